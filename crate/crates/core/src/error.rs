use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation not supported on this group: {0}")]
    Unsupported(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("progression is not 2-proper")]
    NotTwoProper,

    #[error("zero is not an element of the divided set")]
    ZeroNotInSet,

    #[error("iterated sumset is not contained in the progression (witness {0})")]
    ContainmentFailed(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
