//! Library error type.

use std::fmt;

/// Errors produced by rule construction, integration and fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on the arguments was violated.
    Precondition(String),
    /// An iterative procedure failed to converge. Carries a diagnostic
    /// message including the last iterates where applicable.
    NonConvergence(String),
    /// An integrand returned a non-finite value. The offending node is
    /// reported so the caller can locate the failure.
    EvalFailure { node: Vec<f64>, detail: String },
    /// A weight-specification or corpus-id string could not be parsed.
    Parse(String),
    /// A resource guard tripped (for example the hyperbolic-cross
    /// raw-triple cap).
    ResourceLimit(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::NonConvergence(msg) => write!(f, "failed to converge: {msg}"),
            Error::EvalFailure { node, detail } => {
                write!(f, "integrand evaluation failed at {node:?}: {detail}")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::ResourceLimit(msg) => write!(f, "resource limit: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
