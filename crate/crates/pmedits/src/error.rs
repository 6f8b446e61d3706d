use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty string")]
    EmptyString,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("invalid alignment: {0}")]
    Invalid(String),
    #[error("alignment domains do not match")]
    DomainMismatch,
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("corrupt data: {0}")]
    Corrupt(String),
    #[error("unsupported sketch version {0}")]
    Unsupported(u8),
    #[error("alignment graph has no black components")]
    NoBlackComponents,
    #[error("internal invariant broken: {0}")]
    InternalInvariantBroken(String),
    #[error("occurrence is already captured by the alignment set")]
    RejectedCaptured,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("occurrence set does not come from the lower-bound family: {0}")]
    NotFromFamily(String),
}
