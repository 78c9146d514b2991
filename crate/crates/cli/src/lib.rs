//! Archive format, reports and the `nullmem` command line.

pub mod archive;
pub mod commands;
pub mod error;
pub mod report;

pub use commands::{run, Cli};
pub use error::{CliError, Result, EXIT_CODES};
