#![no_main]

use libfuzzer_sys::fuzz_target;
use skewrot_cli::config::{parse_point, parse_points, parse_real};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(z) = parse_point("z0", text) {
        assert!(z.is_finite());
    }
    if let Ok(zs) = parse_points("z0", text) {
        assert!(zs.iter().all(|z| z.is_finite()));
    }
    if let Ok(x) = parse_real("h", text) {
        assert!(x.is_finite());
    }
});
