//! Library side of the `powerbin` command: contract files, reports and the
//! subcommands themselves.

pub mod commands;
pub mod contract_file;
pub mod error;
pub mod report;

pub use commands::{run, Cli, Outcome};
pub use error::CliError;
