#![no_main]

use cpb_core::oracle::Corruption;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(c) = s.parse::<Corruption>() {
            assert_eq!(c.to_string().parse::<Corruption>().expect("round trip"), c);
        }
    }
});
