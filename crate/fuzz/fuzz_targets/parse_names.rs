#![no_main]

use apnforge::family::Family;
use apnforge::theorems::{parse_suites, Suite};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Some(f) = Family::parse(text) {
        assert_eq!(Family::parse(&f.to_string()), Some(f));
    }
    if let Some(s) = Suite::parse(text) {
        assert_eq!(Suite::parse(s.name()), Some(s));
    }
    if let Ok(suites) = parse_suites(text) {
        assert!(!suites.is_empty());
    }
});
