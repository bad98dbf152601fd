#![no_main]

use entropic_qsl::scenario::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = parse_config(text) else {
        return;
    };
    // Anything accepted must survive its own canonical echo unchanged.
    let canonical = cfg.canonical_toml();
    let again = parse_config(&canonical).expect("canonical config parses");
    assert_eq!(again.canonical_toml(), canonical);
    let _ = cfg.tau_values();
    let _ = cfg.alpha_values();
});
