//! Command-line front end: configuration, subcommands and artifact files.

pub mod commands;
pub mod config;
pub mod io;

use std::path::PathBuf;

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::error::ConfigError;

pub use commands::{cmd_baseline, cmd_compare, cmd_eval, cmd_robustness, cmd_train, RunManifest, RunReport};
pub use config::{parse_config, ConfigFile, Overrides, ResolvedConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}
