use thiserror::Error;

use crate::representation::TagScheme;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: tag `{tag}` is not valid for scheme {scheme}")]
    Tag {
        line: usize,
        tag: String,
        scheme: TagScheme,
    },

    #[error("invalid tag `{tag}` for scheme {scheme}")]
    InvalidTag { tag: String, scheme: TagScheme },

    #[error("scheme {0} cannot be decoded on its own; pair it with another partial scheme")]
    UnsupportedScheme(TagScheme),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
