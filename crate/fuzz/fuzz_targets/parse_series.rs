#![no_main]

use libfuzzer_sys::fuzz_target;
use wedgehs::expode::AnySeries;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = serde_json::from_str::<AnySeries>(text) {
        let json = match &s {
            AnySeries::Ordinary(x) => serde_json::to_string(x),
            AnySeries::Egf(x) => serde_json::to_string(x),
        }
        .unwrap();
        let again: AnySeries = serde_json::from_str(&json).unwrap();
        assert_eq!(again, s);
    }
});
