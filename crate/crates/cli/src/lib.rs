//! The `hamb` command-line tool as a library, so it can be driven in-process.

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;
pub mod report;

pub use cli::run;
pub use error::{exit, CliError, ParseError};
