#![no_main]

use libfuzzer_sys::fuzz_target;
use spherical_mc::cli::parse_args;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let args = std::iter::once("spherical-mc").chain(s.split('\0'));
        let _ = parse_args(args);
    }
});
