//! Workspace files and the `finitopos` command line.

pub mod commands;
pub mod workspace;

pub use commands::{run, Cli, Command, Outcome, Report, CLI_SCHEMA};
pub use workspace::{parse_workspace, Declarations, Model, Workspace, WsError};
