#![no_main]

use libfuzzer_sys::fuzz_target;
use stable_area::cli::grid::parse_grid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_grid(text) {
        assert!(g.n >= 1 && g.lo <= g.hi);
        assert_eq!(g.linear().len(), g.n);
        if let Some(pts) = g.geometric() {
            assert_eq!(pts.len(), g.n);
        }
        assert_eq!(parse_grid(&g.to_string()), Ok(g));
    }
});
