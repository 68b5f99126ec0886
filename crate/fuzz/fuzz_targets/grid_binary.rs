#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(grid) = transduction::io::read_grid_binary(data) {
        let _ = transduction::optical::mode_volume(&grid);
        let mut out = Vec::new();
        transduction::io::write_grid_binary(&mut out, &grid).expect("re-encode");
        assert_eq!(out, data, "accepted grid must round-trip");
    }
});
