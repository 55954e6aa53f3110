#![no_main]

use libfuzzer_sys::fuzz_target;
use wedgehs::GradedEndo;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(d) = serde_json::from_str::<GradedEndo>(text) {
        let again: GradedEndo = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(again, d);
    }
});
