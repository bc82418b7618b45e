use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("elevation sampling: {0}")]
    Sampling(String),

    #[error("configuration: {0}")]
    Config(String),

    /// Input validation collects every problem before failing, so callers
    /// can report all of them at once instead of fixing files one error
    /// at a time.
    #[error("validation failed with {} error(s):\n  {}", .0.len(), .0.join("\n  "))]
    Validation(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
