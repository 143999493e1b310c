use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller passed something outside the operation's contract
    /// (bad label, index out of range, wrong shape).
    #[error("usage error: {0}")]
    Usage(String),

    /// Numerical input violates a mathematical precondition
    /// (non-Hermitian, non-unitary, unnormalized).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value violates its documented bound.
    #[error("configuration error: {field}: {message}")]
    Config { field: String, message: String },

    #[error("numerical degeneracy: reconstruction residual {residual:.3e} exceeds tolerance")]
    NumericalDegeneracy { residual: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
