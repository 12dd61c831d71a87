#![no_main]

use libfuzzer_sys::fuzz_target;
use tesgo::results::{read_results, write_results};

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = read_results(data) {
        let mut buf = Vec::new();
        write_results(&mut buf, &records).unwrap();
        let again = read_results(&buf[..]).unwrap();
        assert_eq!(again.len(), records.len());
    }
});
