#![no_main]

use libfuzzer_sys::fuzz_target;

// First three bytes pick an optional resampling shape; the rest is CSV.
fuzz_target!(|data: &[u8]| {
    let (shape, body) = match data {
        [0, rest @ ..] => (None, rest),
        [a, b, c, rest @ ..] => (Some([*a as usize % 17, *b as usize % 17, *c as usize % 17]), rest),
        _ => return,
    };
    if let Ok(grid) = transduction::io::read_grid_csv(body, shape) {
        let _ = transduction::optical::mode_volume(&grid);
    }
});
