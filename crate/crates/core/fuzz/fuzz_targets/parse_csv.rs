#![no_main]

use copent::data::{parse_csv, sniff_header, validate};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for has_header in [false, true] {
        if let Ok(m) = parse_csv(text, has_header, None) {
            assert!(m.rows() >= 2);
            assert!(m.as_slice().iter().all(|v| v.is_finite()));
            let _ = validate(&m);
        }
    }
    let _ = sniff_header(text);
});
