use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: requested {requested}, capacity {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested eigenvector sits exactly on a pole of the secular
    /// equation, i.e. it belongs to a deflated (degenerate) level.
    #[error("eigenvalue {level} is a deflated level at pole {pole}; use the deflated-eigenvector branch")]
    DeflatedLevel { level: usize, pole: f64 },

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("integration quality: norm drift {drift:e} after {steps} steps exceeds {limit:e}")]
    IntegrationQuality {
        drift: f64,
        steps: usize,
        limit: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
