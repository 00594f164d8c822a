use thiserror::Error;

/// Errors raised by the algebra kernels and scheme constructors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("association scheme axiom violated: {0}")]
    AxiomViolation(String),

    #[error("structure check failed: {0}")]
    Structure(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
