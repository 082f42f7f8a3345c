#![no_main]

use libfuzzer_sys::fuzz_target;
use morphoskel_cli::config::PartialConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = PartialConfig::from_json(text) {
        let _ = config.clone().overlay(PartialConfig::default()).resolve();
        let _ = PartialConfig::default().overlay(config).resolve();
    }
});
