#![no_main]

use libfuzzer_sys::fuzz_target;
use stable_area::coeffs::exact::parse_rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_rational(text) {
        let canonical = r.to_string();
        // short literals such as 1e-70 expand past the input length cap
        if canonical.len() <= 64 {
            assert_eq!(parse_rational(&canonical).expect("canonical form parses"), r);
        }
    }
});
