#![no_main]

use libfuzzer_sys::fuzz_target;
use rcap_core::format::{parse_mixed, write_mixed};

fuzz_target!(|text: &str| {
    if let Ok(p) = parse_mixed(text) {
        assert!(p.probs().iter().all(|q| (0.0..=1.0).contains(q)));
        let again = parse_mixed(&write_mixed(&p)).expect("written profile reparses");
        assert_eq!(p.probs(), again.probs());
    }
});
