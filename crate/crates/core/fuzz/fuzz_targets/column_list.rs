#![no_main]

use copent::data::{parse_column_list, parse_csv};
use libfuzzer_sys::fuzz_target;

// First line is the column list, the rest is the CSV body.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let (list, body) = text.split_once('\n').unwrap_or((text, ""));
    let header: Vec<String> = body
        .lines()
        .next()
        .map(|l| l.split(',').map(|f| f.trim().to_string()).collect())
        .unwrap_or_default();
    if let Ok(specs) = parse_column_list(list, Some(&header)) {
        if let Ok(m) = parse_csv(body, true, Some(&specs)) {
            assert_eq!(m.cols(), specs.len());
        }
    }
});
