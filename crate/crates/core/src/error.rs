use std::io;

use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are grouped so a front end can map them onto exit codes:
/// configuration, parse, numeric and IO failures are kept apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("contract error: {0}")]
    Contract(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("selective risk is undefined at zero coverage")]
    UndefinedRisk,
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("incomplete result grid: {0}")]
    IncompleteGrid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
