use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("state cap of {cap} exceeded")]
    StateCap { cap: usize },
    #[error("net is unbounded (place {place} accumulates tokens)")]
    Unbounded { place: String },
    #[error("count overflow")]
    Overflow,
    #[error("{0}")]
    Invalid(String),
    #[error("resource limit: {0}")]
    Resource(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
