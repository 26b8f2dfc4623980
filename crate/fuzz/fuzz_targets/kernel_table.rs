//! Arbitrary bytes through the kernel table reader and the fit.

#![no_main]

use analog_sqed_cli::table::{fit_table, parse_kernel_table};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_kernel_table(text) {
        let _ = fit_table(&rows);
    }
});
