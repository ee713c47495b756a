#![no_main]

use apnforge_cli::range::parse_range;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(r) = parse_range::<u64>(text) {
        assert!(r.start() <= r.end());
        let again = parse_range::<u64>(&format!("{}:{}", r.start(), r.end())).unwrap();
        assert_eq!(again, r);
    }
    if let Ok(r) = parse_range::<u32>(text) {
        assert_eq!(parse_range::<u64>(text).unwrap(), u64::from(*r.start())..=u64::from(*r.end()));
    }
});
