#![no_main]

use entropic_qsl::scenario::parse_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(parsed) = parse_csv(text) else {
        return;
    };
    for row in &parsed.rows {
        assert_eq!(row.len(), parsed.header.len());
    }
    for name in &parsed.header {
        let _ = parsed.column(name);
        let _ = parsed.column_bool(name);
    }
    let _ = parsed.metadata_value("scenario");
});
