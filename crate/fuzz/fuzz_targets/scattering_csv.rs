#![no_main]

use libfuzzer_sys::fuzz_target;
use miura_scatter::io::parse_scattering_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(s) = parse_scattering_csv(text) {
            assert_eq!(s.len(), s.k_grid().len());
        }
    }
});
