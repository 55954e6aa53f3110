#![no_main]

use libfuzzer_sys::fuzz_target;
use wedgehs::Rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(q) = text.parse::<Rational>() {
        let shown = q.to_string();
        assert_eq!(shown.parse::<Rational>().unwrap(), q);
    }
});
