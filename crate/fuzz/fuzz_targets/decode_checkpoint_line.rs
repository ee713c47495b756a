#![no_main]

use apnforge_cli::checkpoint::{decode_line, encode_line};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|line: &str| {
    if let Some(record) = decode_line(line) {
        let encoded = encode_line(&record);
        assert_eq!(encoded.matches('\n').count(), 1);
        assert_eq!(decode_line(encoded.trim_end_matches('\n')), Some(record));
    }
});
