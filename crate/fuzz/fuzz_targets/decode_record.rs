#![no_main]

use libfuzzer_sys::fuzz_target;
use spherical_mc::cli::OutputRecord;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(r) = OutputRecord::decode(s) {
            let line = r.to_json_line();
            let again = OutputRecord::decode(&line).expect("encoded record decodes");
            assert_eq!(again.to_json_line(), line);
            for term in r.exact.iter().flatten() {
                let _ = term.to_f64();
            }
        }
    }
});
