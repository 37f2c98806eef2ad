use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;
pub const EXIT_IO: u8 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: selcls::Error },
    #[error(transparent)]
    Core(#[from] selcls::Error),
}

pub type CliResult<T> = Result<T, CliError>;

fn core_exit_code(e: &selcls::Error) -> u8 {
    use selcls::Error::*;
    match e {
        Config(_) => EXIT_CONFIG,
        Parse { .. } => EXIT_PARSE,
        Numeric(_) | UndefinedRisk => EXIT_NUMERIC,
        Io(_) => EXIT_IO,
        Domain(_) | Shape(_) | Size(_) | Contract(_) | DegenerateData(_) | IncompleteGrid(_) => EXIT_FAILURE,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Io { .. } => EXIT_IO,
            CliError::File { source, .. } | CliError::Core(source) => core_exit_code(source),
        }
    }
}

/// Attaches `path` to a library error raised while handling that file.
pub fn in_file<T>(path: &Path, r: selcls::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
