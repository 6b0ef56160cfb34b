use thiserror::Error;

/// Crate-wide error type. The three variants map onto the CLI exit codes:
/// usage errors exit 1, exceeded budgets exit 2, violated mathematical
/// preconditions exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Process exit code for the CLI front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Budget(_) => 2,
            Error::Precondition(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
