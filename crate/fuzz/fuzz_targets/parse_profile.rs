#![no_main]

use libfuzzer_sys::fuzz_target;
use rcap_core::format::{parse_profile, write_profile};

fuzz_target!(|text: &str| {
    if let Ok(s) = parse_profile(text) {
        assert_eq!(write_profile(&s), text.trim());
    }
});
