#![no_main]

use libfuzzer_sys::fuzz_target;
use spherical_mc::exact::{parse_rational, rational_to_f64};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(q) = parse_rational(s) {
            let again = parse_rational(&q.to_string()).expect("canonical form reparses");
            assert_eq!(q, again);
            let _ = rational_to_f64(&q);
        }
    }
});
