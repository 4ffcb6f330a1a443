use thiserror::Error;

/// Errors raised across the crate. Each variant maps to a CLI exit code
/// through [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("regime error: {0}")]
    Regime(String),
    #[error("accuracy error: {what} (achieved {achieved:.3e}, requested {requested:.3e})")]
    Accuracy {
        what: String,
        achieved: f64,
        requested: f64,
    },
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("untileable region: {0}")]
    Untileable(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn regime(msg: impl Into<String>) -> Self {
        Error::Regime(msg.into())
    }

    /// Process exit code: 2 parameter, 3 regime, 4 accuracy, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Untileable(_) | Error::Range(_) | Error::Capacity(_) => 2,
            Error::Regime(_) => 3,
            Error::Accuracy { .. } => 4,
            _ => 1,
        }
    }
}
