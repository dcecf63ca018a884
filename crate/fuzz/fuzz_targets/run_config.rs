#![no_main]

use bandfill::parse_run_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = parse_run_config(text) {
            let echoed = serde_json::to_string(&config).unwrap();
            assert_eq!(parse_run_config(&echoed).unwrap(), config);
        }
    }
});
