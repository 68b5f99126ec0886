#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(file) = transduction::presets::PresetFile::parse(text) {
            let mut cat = transduction::presets::Catalog::builtin();
            cat.merge(file);
        }
    }
});
