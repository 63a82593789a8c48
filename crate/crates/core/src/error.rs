use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpiralError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible point: entry {index} is {value} (must be >= 0)")]
    Infeasible { index: usize, value: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dense materialization of a {rows}x{cols} operator exceeds the 2^22 entry limit")]
    TooLargeToMaterialize { rows: usize, cols: usize },

    #[error("subproblem returned an infeasible point")]
    InfeasibleSubproblem,

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SpiralError>;
