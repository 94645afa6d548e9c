//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the samplers, evaluators and codecs in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A complex argument lies outside the domain of an analytic function.
    #[error("domain error: {0}")]
    Domain(String),
    /// Numerical integration failed to reach its tolerance.
    #[error("quadrature did not converge (value {value:e}, error estimate {error:e})")]
    Quadrature {
        /// Best estimate obtained.
        value: f64,
        /// Achieved error estimate.
        error: f64,
    },
    /// A time or position lies outside the range covered by an object.
    #[error("out of range: {0}")]
    Range(String),
    /// A codeword, tree or input file is malformed.
    #[error("malformed input: {0}")]
    Malformed(String),
    /// An internal consistency check failed; indicates a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// A verification suite name is not registered.
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
