use thiserror::Error;

use crate::padic::PadicError;
use crate::shape::ShapeParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Shape(#[from] ShapeParseError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("divisor undetermined at precision {precision} even after escalation for {what}")]
    PrecisionExhausted { what: String, precision: u32 },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("Weil bound violated: {0}")]
    WeilViolation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
