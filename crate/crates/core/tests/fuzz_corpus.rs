//! Replays the checked-in fuzz corpus through the parsers with the same
//! assertions as the fuzz targets.

use std::fs;
use std::path::PathBuf;

use ndeb_core::parse::{parse_bell_indices, parse_config, parse_dim_range, MAX_CLI_DIM};
use ndeb_core::Dim;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn config_seeds() {
    let mut accepted = 0;
    for (name, data) in seeds("config_json") {
        let Ok(text) = std::str::from_utf8(&data) else { continue };
        if let Ok(cfg) = parse_config(text) {
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn range_seeds() {
    for (_, data) in seeds("range_spec") {
        let Ok(text) = std::str::from_utf8(&data) else { continue };
        if let Ok(dims) = parse_dim_range(text) {
            assert!(!dims.is_empty());
            assert!(dims.windows(2).all(|w| w[1].get() == w[0].get() + 1));
            assert!(dims.iter().all(|d| (2..=MAX_CLI_DIM).contains(&d.get())));
        }
    }
}

#[test]
fn bell_index_seeds() {
    for (_, data) in seeds("bell_indices") {
        let Some((&n, rest)) = data.split_first() else { continue };
        let dim = Dim::new(2 + (n % 15) as usize).unwrap();
        let Ok(text) = std::str::from_utf8(rest) else { continue };
        if let Ok(idx) = parse_bell_indices(text, dim) {
            assert!(idx.iter().all(|&i| i < dim.get()));
        }
    }
}
