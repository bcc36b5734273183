//! Command-line front end and file formats for `sre-core`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 resource guard, 4 internal
//! consistency failure, 1 other IO errors.

pub mod cli;
pub mod error;
pub mod guard;
pub mod manifest;
pub mod output;
pub mod state_io;

pub use cli::{run, Cli, Command};
pub use error::{CliError, CliResult};
