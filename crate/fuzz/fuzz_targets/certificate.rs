#![no_main]
use homcount::dichotomy::Certificate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = Certificate::from_json(s);
    }
});
