//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid date: {0}")]
    InvalidDate(String),

    #[error("unsupported region: latitude {0} is polar (|lat| >= 66.5)")]
    PolarLatitude(f64),

    #[error("direction below horizon: altitude {0} deg")]
    BelowHorizon(f64),

    #[error("incomplete cube map: missing face {0}")]
    MissingFace(&'static str),

    #[error("negative flux: {component} = {value}")]
    NegativeFlux { component: &'static str, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("gradient singular at Q_total = 0")]
    SingularGradient,

    #[error("CSV schema error: {0}")]
    Schema(String),

    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },

    #[error("field `{field}` missing in every record of day {day}")]
    UnimputableField { field: &'static str, day: String },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("training diverged (loss is not finite) at epoch {epoch} with lr {lr}")]
    Diverged { epoch: usize, lr: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("checkpoint version mismatch: file has {found}, expected {expected}")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("image error: {0}")]
    Image(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<image::ImageError> for CoreError {
    fn from(e: image::ImageError) -> Self {
        CoreError::Image(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
