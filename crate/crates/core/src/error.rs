use thiserror::Error;

/// Errors raised by grid construction, transforms and the checks built on them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("translation kernel calibration failed (worst residual {worst:.3e}): {details}")]
    Calibration { worst: f64, details: String },

    #[error("invalid state: {0}")]
    State(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("admissibility: {0}")]
    Admissibility(String),

    #[error("missing capability: {0}")]
    Capability(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
