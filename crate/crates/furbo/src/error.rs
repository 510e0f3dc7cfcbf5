//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point outside the unit cube: coordinate {index} = {value}")]
    OutOfDomain { index: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("Cholesky factorization failed even with jitter up to {max_jitter:e}")]
    CholeskyFailed { max_jitter: f64 },

    #[error("low-discrepancy generator limit exceeded: {0}")]
    SobolLimit(String),

    #[error("constraint generation gave no viable feasible region after {attempts} attempts")]
    DegenerateConstraints { attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
