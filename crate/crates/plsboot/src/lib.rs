//! File formats, configuration and subcommands of the `plsboot` tool.

pub mod commands;
pub mod config;
pub mod io;
pub mod manifest;

pub use commands::{run, RunError, RunSummary};
pub use config::{Cli, Command, RunConfig};
pub use io::{load_csv, save_csv, IoError, Table};
