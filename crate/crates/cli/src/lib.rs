//! Configuration-driven experiment runner.
//!
//! A run reads a flat config, executes one experiment and writes a JSON
//! report, a results CSV, a plot-data CSV and a metadata sidecar.

pub mod config;
pub mod experiments;
pub mod outcome;

use std::path::Path;

pub use config::{schema_text, ConfigError, Experiment, ExperimentConfig, RawConfig, SCHEMA_VERSION};
pub use experiments::execute;
pub use outcome::{Assertion, Outcome};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Result of `sdof run`.
#[derive(Debug)]
pub struct RunStatus {
    pub code: i32,
    pub outcome: Option<Outcome>,
    pub message: String,
}

/// Loads a config file, applies overrides and validates.
pub fn load_config<S: AsRef<str>>(path: &Path, overrides: &[S]) -> Result<ExperimentConfig, ConfigError> {
    let mut raw = RawConfig::read(path)?;
    raw.apply_overrides(overrides)?;
    raw.into_config()
}

/// Executes a validated config and writes its artifacts.
pub fn run(config: &ExperimentConfig) -> RunStatus {
    let outcome = execute(config);
    if let Err(e) = outcome.write(config) {
        return RunStatus {
            code: EXIT_FAIL,
            outcome: Some(outcome),
            message: format!("cannot write outputs: {e}"),
        };
    }
    let failed: Vec<&str> = outcome
        .assertions
        .iter()
        .filter(|a| !a.passed)
        .map(|a| a.name.as_str())
        .collect();
    let (code, message) = if failed.is_empty() {
        (EXIT_PASS, format!("{}: all assertions pass", config.experiment))
    } else {
        (
            EXIT_FAIL,
            format!("{}: failed {}", config.experiment, failed.join(", ")),
        )
    };
    RunStatus {
        code,
        outcome: Some(outcome),
        message,
    }
}

/// `sdof run`: usage errors write nothing.
pub fn run_file<S: AsRef<str>>(path: &Path, overrides: &[S]) -> RunStatus {
    match load_config(path, overrides) {
        Ok(config) => run(&config),
        Err(e) => RunStatus {
            code: EXIT_USAGE,
            outcome: None,
            message: e.to_string(),
        },
    }
}
