#![no_main]

use libfuzzer_sys::fuzz_target;
use wedgehs::input::parse_matrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = parse_matrix(text, 4) {
        assert_eq!(m.entries.rows(), m.rank);
        assert_eq!(m.entries.cols(), m.rank);
        let _ = m.endomorphism();
    }
});
