#![no_main]

use cpb_core::model::TunnelingAmplitudes;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(amps) = TunnelingAmplitudes::parse_text(s) {
            let again = TunnelingAmplitudes::parse_text(&amps.to_text()).expect("round trip");
            assert_eq!(amps.as_slice(), again.as_slice());
        }
    }
});
