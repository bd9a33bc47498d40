#![no_main]

use libfuzzer_sys::fuzz_target;
use stable_area::cli::config::{parse_config, KEYS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config(text) {
        assert!(cfg.len() <= KEYS.len());
        for key in KEYS {
            let _ = cfg.get::<f64>(key);
            let _ = cfg.get::<u64>(key);
            let _ = cfg.get::<bool>(key);
        }
    }
});
