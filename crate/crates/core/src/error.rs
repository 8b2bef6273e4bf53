//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    InvalidInput(String),
    /// The requested operation exists but is not applicable to these inputs
    /// (wrong space kind, dimension over the hard cap, backend/p mismatch).
    Unsupported(String),
    /// An iteration budget ran out before the tolerance was met; carries the
    /// best estimate and the residual error bound at the point of failure.
    Budget {
        what: &'static str,
        estimate: f64,
        residual: f64,
    },
    /// A property the theory requires was found violated numerically
    /// (positivity of part integrals, strict norm inequalities, divergence
    /// of a truncated integral).
    PropertyViolation(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::Budget {
                what,
                estimate,
                residual,
            } => write!(
                f,
                "{what} budget exhausted (best estimate {estimate:e}, residual {residual:e})"
            ),
            Error::PropertyViolation(msg) => write!(f, "property violation: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn unsupported(msg: impl Into<String>) -> Error {
    Error::Unsupported(msg.into())
}

pub(crate) fn violation(msg: impl Into<String>) -> Error {
    Error::PropertyViolation(msg.into())
}
