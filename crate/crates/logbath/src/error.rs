//! Error taxonomy shared by every layer of the crate.
//!
//! Variants split into two camps: bad inputs (domain violations, unusable
//! configuration, unsupported density kinds) and numerical breakdown
//! (tolerance not met, divergent tails, exhausted expansions). The CLI maps
//! the first camp to exit code 2 and the second to exit code 3.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operation not defined for this spectral-density kind.
    #[error("unsupported density kind: {0}")]
    UnsupportedKind(String),

    /// A stated precondition of the operation is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Quadrature failed to reach the requested tolerance.
    #[error("tolerance not met for {what}: achieved {achieved:.3e}, requested {requested:.3e}")]
    ToleranceNotMet {
        what: String,
        achieved: f64,
        requested: f64,
    },

    /// Evaluation point beyond the direct-quadrature range.
    #[error("tau = {tau} exceeds the direct-quadrature limit {max}; use the long-time evaluator (CLI: `asympt`)")]
    TauOutOfRange { tau: f64, max: f64 },

    /// A tail or series shows no sign of settling.
    #[error("divergent or non-settling computation: {0}")]
    Divergent(String),

    /// Every candidate term of a low-frequency expansion dropped out.
    #[error("expansion exhausted: {0}")]
    ExpansionExhausted(String),

    /// Mellin evaluation requested outside the strip of convergence.
    #[error("point outside the admissible strip: {0}")]
    OutOfStrip(String),

    /// Too few samples for the requested fit or profile.
    #[error("insufficient samples: need at least {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    /// Malformed configuration file or flag combination.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::UnsupportedKind(_)
            | Error::Precondition(_)
            | Error::TauOutOfRange { .. }
            | Error::InsufficientSamples { .. }
            | Error::Config(_)
            | Error::Io(_) => 2,
            Error::ToleranceNotMet { .. }
            | Error::Divergent(_)
            | Error::ExpansionExhausted(_)
            | Error::OutOfStrip(_) => 3,
        }
    }
}
