#![no_main]

use libfuzzer_sys::fuzz_target;
use ndeb_core::parse::{parse_dim_range, MAX_CLI_DIM};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(dims) = parse_dim_range(text) {
        assert!(!dims.is_empty());
        assert!(dims.windows(2).all(|w| w[1].get() == w[0].get() + 1));
        assert!(dims.iter().all(|d| (2..=MAX_CLI_DIM).contains(&d.get())));
    }
});
