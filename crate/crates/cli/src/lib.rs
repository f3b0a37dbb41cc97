//! Command-line driver for `chiral-ladder-core`: JSON configs in, CSV and
//! JSON reports plus a run manifest out.
//!
//! Exit codes: 0 success, 1 config or usage error, 2 solver failure,
//! 3 I/O failure.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use args::Cli;
pub use commands::run;
pub use config::{ConfigFile, GridSpec};
pub use error::CliError;
