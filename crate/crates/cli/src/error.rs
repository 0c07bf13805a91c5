use std::fmt;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const SIZE_LIMIT: i32 = 3;
    pub const SELFTEST: i32 = 4;
}

/// A graph-file error with its position, when one is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
    pub size_limit: bool,
}

impl ParseError {
    pub fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line: Some(line),
            column: Some(column),
            message: message.into(),
            size_limit: false,
        }
    }

    pub fn unplaced(message: impl Into<String>) -> Self {
        ParseError {
            line: None,
            column: None,
            message: message.into(),
            size_limit: false,
        }
    }

    pub(crate) fn size_limit(mut self) -> Self {
        self.size_limit = true;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Parse(#[from] ParseError),

    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    SizeLimit(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{failed} self-test suite(s) failed")]
    SelftestFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Parse(e) if e.size_limit => exit::SIZE_LIMIT,
            CliError::Parse(_) | CliError::Input(_) | CliError::Io { .. } => exit::INPUT,
            CliError::SizeLimit(_) => exit::SIZE_LIMIT,
            CliError::SelftestFailed { .. } => exit::SELFTEST,
        }
    }
}

impl From<hamb_core::Error> for CliError {
    fn from(e: hamb_core::Error) -> Self {
        match e {
            hamb_core::Error::TooLarge { .. } => CliError::SizeLimit(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
