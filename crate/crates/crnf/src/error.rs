//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("variable-kind mismatch: {0}")]
    KindMismatch(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("singular pivot in block {block} (lambda outside the certified regime?)")]
    SingularBlock { block: usize },
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("generator Gram matrix is rank deficient at degree {degree} ({detail})")]
    RankDeficient { degree: u32, detail: String },
    #[error("non-finite float value produced in {0}")]
    NonFinite(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
