use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("function `{name}` at byte {offset} expects {expected} argument(s), got {found}")]
    Arity {
        name: String,
        offset: usize,
        expected: &'static str,
        found: usize,
    },

    #[error("undefined sum (+inf) + (-inf)")]
    UndefinedSum,

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("function is not proper: {0}")]
    Improper(String),

    #[error("point {0:?} is not a grid point")]
    NotGridPoint(Vec<f64>),

    #[error("function value at the base point is not finite")]
    NonFiniteBase,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("class mismatch: {0}")]
    ClassMismatch(String),

    #[error("discretization failure: {0}")]
    Discretization(String),

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
