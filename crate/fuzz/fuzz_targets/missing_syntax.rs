#![no_main]

use bandfill::masks::format_missing_1d;
use bandfill::{parse_missing, MissingSet};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // 1D sets must survive a format/parse round trip
    if let Ok(MissingSet::OneD(mut indices)) = parse_missing(text) {
        indices.sort_unstable();
        indices.dedup();
        let again = parse_missing(&format_missing_1d(&indices)).unwrap().into_1d().unwrap();
        assert_eq!(again, indices);
    }
});
