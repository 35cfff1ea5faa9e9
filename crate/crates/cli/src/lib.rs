//! Config parsing, experiment orchestration and report emission for the
//! `bilop` binary.

pub mod config;
mod run;

pub use config::{parse_config, parse_config_with, ConfigError, Experiment, Origin, RawConfig, RunConfig, SymbolKind};
pub use run::{build_symbol, execute, run, RunOutcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<ConfigError>),
    #[error(transparent)]
    Core(#[from] bilop::Error),
    #[error("io: {0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Process exit status for an error: always 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
