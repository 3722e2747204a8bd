#![no_main]

use libfuzzer_sys::fuzz_target;
use skewrot_cli::config::parse_override;
use skewrot_cli::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let parsed = parse_override(text);
    let mut cfg = ExperimentConfig::new("fig3-oval");
    let applied = cfg.apply_override(text);
    // applying can only add checks on top of splitting
    if parsed.is_err() {
        assert!(applied.is_err());
    }
});
