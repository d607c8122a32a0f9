use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("field elements belong to different cyclotomic fields")]
    FieldMismatch,

    #[error("element lies outside the enumerated ball (max length {max_length}); enumerate a larger ball")]
    BallExhausted { max_length: usize },

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("sheaf axiom violated: {0}")]
    Axiom(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
