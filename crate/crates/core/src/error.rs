use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Smallest eigenvalue fell below the PSD tolerance.
    #[error("state is not positive semi-definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("rejection sampling exhausted after {attempts} attempts; coherence bounds too large")]
    Exhausted { attempts: usize },

    /// Reference state has a (numerically) vanishing eigenvalue; relative
    /// entropy diverges.
    #[error("reference state is singular (smallest eigenvalue {min_eigenvalue:e})")]
    SingularReference { min_eigenvalue: f64 },

    #[error("integration step too large: {0}")]
    StepTooLarge(String),

    #[error("{non_finite} of {samples} Monte-Carlo samples evaluated non-finite")]
    NonFinite { non_finite: u64, samples: u64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid value for `{field}`: {msg}")]
    InvalidConfig { field: String, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: &str, msg: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            msg: msg.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
