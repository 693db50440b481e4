#![no_main]

use copent::data::{parse_csv, to_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = parse_csv(text, false, None) {
        let again = parse_csv(&to_csv(&m), false, None).expect("serialized matrix parses");
        assert_eq!(again, m);
    }
});
