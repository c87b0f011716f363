//! Command-line front end: configuration, the `verify` suite and the
//! CSV/JSON writers behind the `spinboson` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

pub use config::{ConfigFile, MethodChoice, Overrides, RunConfig};
pub use error::CliError;
