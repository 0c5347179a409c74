#![no_main]

use libfuzzer_sys::fuzz_target;
use rcap_core::format::{parse_ucp, write_ucp};

fuzz_target!(|text: &str| {
    if let Ok(inst) = parse_ucp(text) {
        let again = parse_ucp(&write_ucp(&inst)).expect("written instance reparses");
        assert_eq!(inst.sets(), again.sets());
        assert_eq!(inst.universe_size(), again.universe_size());
    }
});
