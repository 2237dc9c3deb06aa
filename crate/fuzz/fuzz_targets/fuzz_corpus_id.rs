//! Fuzzes the corpus-id parser.
//!
//! Must never panic; accepted ids must produce a member whose canonical
//! id parses back to the same member, and whose evaluator returns a
//! non-NaN value at a benign probe point.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(input) = std::str::from_utf8(data) {
        if let Ok(member) = freudquad::corpus_oracle::corpus_member(input) {
            let again = freudquad::corpus_oracle::corpus_member(&member.id)
                .expect("canonical id must parse");
            assert_eq!(member.id, again.id);
            let x = vec![0.37f64; member.dim];
            assert!(!member.eval(&x).is_nan());
        }
    }
});
