use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A named inequality the inputs must satisfy, e.g. `theta - q > 0`.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The integrand or argument leaves the domain where the expression is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at `{path}`: {msg}")]
    Parse { path: String, msg: String },

    #[error("unknown check `{name}`; known checks: {known}")]
    UnknownCheck { name: String, known: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

/// Fails with [`Error::Precondition`] naming `what` unless `cond` holds.
pub(crate) fn ensure(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(what.to_string()))
    }
}
