use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{what} on {size} items exceeds the exhaustive limit of {limit}")]
    LimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("vertex {0} is isolated; delete isolated vertices before auditing")]
    IsolatedVertex(usize),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
