//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by builders, solvers, and parsers.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on user-supplied values failed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Operand dimensions are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Operands live in different bases (full space vs a symmetry sector).
    #[error("basis mismatch: `{0}` vs `{1}`")]
    BasisMismatch(String, String),

    /// A numerical guarantee was violated (residual, positivity, trace).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Backend linear-algebra failure.
    #[error("linear algebra backend: {0}")]
    Lapack(#[from] ndarray_linalg::error::LinalgError),

    /// Config file could not be parsed or validated.
    #[error("config error{}: {message}", .line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config {
        /// 1-based line number, when attributable.
        line: Option<usize>,
        /// Human-readable explanation.
        message: String,
    },

    /// Filesystem failure while reading configs or writing outputs.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Config error tied to a specific line.
    pub fn config_at(line: usize, message: impl Into<String>) -> Self {
        Error::Config {
            line: Some(line),
            message: message.into(),
        }
    }

    /// Config error without a line attribution.
    pub fn config(message: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            message: message.into(),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
