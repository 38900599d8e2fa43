use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied parameter violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// An edge-list document could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The operation is not valid in the current state (e.g. empty population).
    #[error("invalid state: {0}")]
    State(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
