//! Batch front end for the fockforge workbench.
//!
//! A run is a [`commands::Command`] applied to an [`config::ExperimentConfig`];
//! the result is a [`output::Table`] rendered as TSV or CSV under a header
//! that carries a hash of the canonical config.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::Path;

pub use commands::{run, Command};
pub use config::{ExperimentConfig, Format};
pub use error::{CliError, ConfigError};
pub use output::Table;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub format: Option<Format>,
}

/// Reads and validates a config file, then applies the seed override.
pub fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(None, path.display().to_string(), e.to_string()))?;
    let mut config = ExperimentConfig::parse(&text)?;
    if let Some(seed) = seed {
        config.measurement.seed = seed;
    }
    Ok(config)
}

/// Runs a command and writes its table. The header hash covers the config
/// after the seed override but before output redirection, so the same
/// experiment written to two places renders identically.
pub fn execute(command: Command, config_path: &Path, overrides: &Overrides) -> Result<(), CliError> {
    let config = load_config(config_path, overrides.seed)?;
    let hash = config.hash();
    let format = overrides.format.unwrap_or(config.output.format);
    let path = overrides.out.clone().unwrap_or_else(|| config.output.path.clone());
    let text = run(command, &config)?.render(&hash, format);
    if path == "-" {
        use std::io::Write;
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|source| CliError::Io {
                path: "-".into(),
                source,
            })
    } else {
        std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })
    }
}
