//! Fuzzes the CLI weight-specification parser.
//!
//! The parser must never panic on arbitrary input; on success the
//! canonical spec string must round-trip to an equal weight.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(input) = std::str::from_utf8(data) {
        if let Ok(weight) = freudquad::weights::parse_weight_spec(input) {
            let canonical = freudquad::weights::weight_spec_string(&weight);
            let again = freudquad::weights::parse_weight_spec(&canonical)
                .expect("canonical spec must parse");
            assert_eq!(weight, again);
        }
    }
});
