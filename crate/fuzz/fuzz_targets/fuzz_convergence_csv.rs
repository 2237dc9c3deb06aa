//! Fuzzes the convergence-table CSV parser behind the `fit` subcommand.
//!
//! Must never panic on arbitrary bytes; tables that parse must re-emit
//! and re-parse to the same shape.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(input) = std::str::from_utf8(data) {
        if let Ok(table) = freudquad::bench::parse_convergence_csv(input) {
            let emitted = table.to_csv();
            let again = freudquad::bench::parse_convergence_csv(&emitted)
                .expect("emitted CSV must parse");
            assert_eq!(again.headers, table.headers);
            assert_eq!(again.rows.len(), table.rows.len());
        }
    }
});
