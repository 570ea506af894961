#![no_main]

use libfuzzer_sys::fuzz_target;
use ndeb_core::parse::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_config(text) {
        cfg.validate().expect("parsed config must validate");
        if let Some(p) = cfg.attack {
            let f = p.fidelity();
            assert!((0.0..=1.0 + 1e-9).contains(&f));
        }
    }
});
