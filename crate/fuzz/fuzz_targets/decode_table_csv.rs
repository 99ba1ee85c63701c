#![no_main]

use libfuzzer_sys::fuzz_target;
use spherical_mc::cli::{decode_table_csv, encode_table_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(rows) = decode_table_csv(s) {
            let text = encode_table_csv(&rows);
            assert_eq!(decode_table_csv(&text).expect("encoded table decodes"), rows);
        }
    }
});
