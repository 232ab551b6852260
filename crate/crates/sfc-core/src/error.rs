//! Engine-wide error type.
//!
//! Variants map onto the CLI exit-code table: config errors exit 2,
//! data/schema errors exit 3, numerical failures exit 4, audit
//! mismatches exit 5.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An accounting identity broke. `residual` is the largest relative
    /// mismatch observed; `phase` names the phase that produced it.
    #[error("audit failure in {phase}: {check} residual {residual:e}")]
    Audit {
        phase: String,
        check: String,
        residual: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Schema(_) | Error::Csv(_) | Error::Json(_) | Error::Io(_) => 3,
            Error::Numerical(_) => 4,
            Error::Audit { .. } => 5,
        }
    }
}
