#![no_main]

use libfuzzer_sys::fuzz_target;
use uea_lab::manifest::{parse_manifest, render};

fuzz_target!(|text: &str| {
    if let Ok(m) = parse_manifest(text) {
        let again = parse_manifest(&render(&m)).expect("rendered manifest parses");
        assert_eq!(again, m);
    }
});
