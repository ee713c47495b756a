#![no_main]

use apnforge_cli::codec::{decode_csv, decode_json, encode_csv, encode_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|bytes: &[u8]| {
    if let Ok(records) = decode_csv(bytes) {
        let encoded = encode_csv(&records).unwrap();
        assert_eq!(decode_csv(&encoded).unwrap(), records);
        assert_eq!(decode_json(&encode_json(&records).unwrap()).unwrap(), records);
    }
});
