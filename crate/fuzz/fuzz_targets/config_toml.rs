#![no_main]

use cpb_cli::config::FileConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = FileConfig::from_toml_str(s);
    }
});
