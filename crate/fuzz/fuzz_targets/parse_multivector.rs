#![no_main]

use libfuzzer_sys::fuzz_target;
use wedgehs::{Blade, Multivector};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(b) = Blade::parse_key(text) {
        assert_eq!(Blade::parse_key(&b.key()).unwrap(), b);
    }
    if let Ok(m) = serde_json::from_str::<Multivector>(text) {
        let again: Multivector = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(again, m);
    }
});
