#![no_main]

use libfuzzer_sys::fuzz_target;
use rcap_core::format::{parse_graph, write_graph};

// Anything accepted must print back to text that parses to the same graph.
fuzz_target!(|text: &str| {
    if let Ok(g) = parse_graph(text) {
        let again = parse_graph(&write_graph(&g)).expect("written graph reparses");
        assert_eq!(g, again);
    }
});
