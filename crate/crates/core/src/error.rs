use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LrpeError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid encoding spec: {0}")]
    InvalidSpec(String),

    #[error("offset {offset} outside table range {min}..={max}")]
    OffsetOutOfRange { offset: i64, min: i64, max: i64 },

    #[error("negative absolute position {0}")]
    NegativePosition(i64),

    #[error("degenerate normalizer {value:e} at row {row}")]
    DegenerateNormalizer { row: usize, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("scaling fit: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, LrpeError>;
