#![no_main]

use libfuzzer_sys::fuzz_target;
use wegan::harness::config::render_config;
use wegan::harness::parse_config_str;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config_str(text) {
        // Anything accepted must render to text that parses back identically.
        let again = parse_config_str(&render_config(&cfg)).expect("rendered config parses");
        assert_eq!(cfg, again);
    }
});
