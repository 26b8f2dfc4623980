//! Arbitrary bytes through the scenario TOML parser and the validator.

#![no_main]

use analog_sqed_cli::{validate, ScenarioConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ScenarioConfig::parse(text) {
        let _ = validate(&cfg).render();
    }
});
