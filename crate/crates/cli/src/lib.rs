//! Configuration handling and subcommands of the `fasttrack` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

pub use commands::Context;
pub use config::RunConfig;
pub use error::CliError;
