//! Replays the checked-in fuzz seeds through the same parser entry points,
//! so a regression shows up without a fuzzing toolchain. Seeds named
//! `reject_*` must be refused; every other seed must parse.

use std::path::PathBuf;
use transduction::io::{read_grid_binary, read_grid_csv, read_pulse_csv, read_response_csv};
use transduction::presets::PresetFile;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn expect(name: &str, parsed: transduction::Result<()>) {
    match parsed {
        Ok(()) => assert!(!name.starts_with("reject_"), "{name} was accepted"),
        Err(e) => assert!(name.starts_with("reject_"), "{name}: {e}"),
    }
}

#[test]
fn pulse_seeds() {
    for (name, data) in seeds("pulse_csv") {
        expect(&name, read_pulse_csv(data.as_slice()).map(drop));
    }
}

#[test]
fn response_seeds() {
    for (name, data) in seeds("response_csv") {
        expect(&name, read_response_csv(data.as_slice()).map(drop));
    }
}

#[test]
fn grid_binary_seeds() {
    for (name, data) in seeds("grid_binary") {
        let parsed = read_grid_binary(data.as_slice());
        if let Ok(grid) = &parsed {
            let mut out = Vec::new();
            transduction::io::write_grid_binary(&mut out, grid).unwrap();
            assert_eq!(out, data, "{name}");
        }
        expect(&name, parsed.map(drop));
    }
}

#[test]
fn grid_csv_seeds() {
    for (name, data) in seeds("grid_csv") {
        let (shape, body) = match data.as_slice() {
            [0, rest @ ..] => (None, rest),
            [a, b, c, rest @ ..] => (Some([*a as usize % 17, *b as usize % 17, *c as usize % 17]), rest),
            _ => panic!("{name}: seed too short"),
        };
        expect(&name, read_grid_csv(body, shape).map(drop));
    }
}

#[test]
fn preset_seeds() {
    for (name, data) in seeds("preset_toml") {
        expect(&name, PresetFile::parse(std::str::from_utf8(&data).unwrap()).map(drop));
    }
}
