//! Error type shared by the algebra, solver and pipeline layers.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("operands live in different parameter contexts")]
    MismatchedContext,
    #[error("not divisible: remainder is nonzero")]
    NotDivisible,
    #[error("non-elementary term: cannot integrate y^-1")]
    NonElementaryTerm,
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported inversion: {0}")]
    UnsupportedInversion(String),
    #[error("unassigned parameter `{0}` in specialization")]
    UnassignedParameter(String),
    #[error("unknown parameter `{0}` in this context")]
    UnknownParameter(String),
    #[error("no grading directions: leading form is a monomial for every direction")]
    NoDirections,
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("stage check `{name}` failed: expected {expected}, got {actual}")]
    CheckFailed {
        name: String,
        expected: String,
        actual: String,
    },
    #[error("pipeline rejected input: {0}")]
    BadPipelineInput(String),
    #[error("solver budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
