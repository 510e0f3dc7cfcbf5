//! Error type for the benchmark harness.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    /// The results directory was produced by a different configuration.
    #[error("stale results cache: {0}")]
    StaleCache(String),
    #[error(transparent)]
    Core(#[from] furbo::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;
