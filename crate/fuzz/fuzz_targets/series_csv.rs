#![no_main]

use bandfill::{read_series_csv, write_series_csv, LoadedSeries};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // anything that parses must write back and re-read identically
    match read_series_csv(data) {
        Ok(LoadedSeries::OneD(f)) => {
            let mut buf = Vec::new();
            write_series_csv(&f.series, &f.absent, &mut buf).unwrap();
            assert_eq!(read_series_csv(buf.as_slice()).unwrap(), LoadedSeries::OneD(f));
        }
        Ok(LoadedSeries::TwoD(f)) => {
            let mut buf = Vec::new();
            write_series_csv(&f.series, &f.absent, &mut buf).unwrap();
            assert_eq!(read_series_csv(buf.as_slice()).unwrap(), LoadedSeries::TwoD(f));
        }
        Err(_) => {}
    }
});
