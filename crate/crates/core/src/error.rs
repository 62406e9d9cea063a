use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The requested table would not fit in the configured memory budget.
    #[error(
        "sieving to {limit} needs about {required_bytes} bytes, budget is {budget_bytes} bytes"
    )]
    Resource {
        limit: u64,
        required_bytes: u64,
        budget_bytes: u64,
    },

    /// A query reached past what the prime table covers.
    #[error("{what} needs a prime table up to {required}, but the table stops at {limit}")]
    OutOfRange {
        what: &'static str,
        required: u64,
        limit: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input is well formed but outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter violates a theorem-level precondition; the message names the condition.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("bad prime cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
