#![no_main]

use libfuzzer_sys::fuzz_target;
use ndeb_core::parse::parse_bell_indices;
use ndeb_core::Dim;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else {
        return;
    };
    let Ok(dim) = Dim::new(2 + (n % 15) as usize) else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(idx) = parse_bell_indices(text, dim) {
        assert!(idx.iter().all(|&i| i < dim.get()));
    }
});
