use thiserror::Error;

use crate::gains::MatchFailure;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("unknown Casimir `{0}`")]
    UnknownCasimir(String),
    #[error("{0} is not invertible")]
    NotInvertible(&'static str),
    #[error("{what} is not symmetric positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite {
        what: &'static str,
        min_eigenvalue: f64,
    },
    #[error("matching failed: {0}")]
    Match(#[from] MatchFailure),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("implicit step {step} did not converge (residual {residual:e})")]
    NoConvergence { step: usize, residual: f64 },
    #[error("{0}")]
    ModeConflict(String),
}

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
