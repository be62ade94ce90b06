//! Command-line front end: layered configuration and the subcommands that
//! write datasets, checkpoints, metrics and generation reports.

pub mod commands;
pub mod config;

use std::ffi::OsString;

use clap::Parser;

pub use commands::{execute, Cli, Command};
pub use config::{ConfigLayer, RunConfig, Task, SEED_ENV};

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    execute(Cli::try_parse_from(args)?)
}
