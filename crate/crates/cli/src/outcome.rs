//! Experiment outcomes and the artifacts written for them.

use std::fs;
use std::io;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Everything an experiment produces before it is written out.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub assertions: Vec<Assertion>,
    pub results: Value,
    pub results_csv: String,
    pub plot_csv: String,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        !self.assertions.is_empty() && self.assertions.iter().all(|a| a.passed)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    /// Outcome recorded when the experiment aborted with an error.
    pub fn aborted(message: String) -> Self {
        Self {
            assertions: vec![Assertion::new("completed", false, message.clone())],
            results: json!({ "error": message }),
            results_csv: String::new(),
            plot_csv: PlotCsv::new().finish(),
        }
    }

    /// Report JSON. Holds no timestamps, so equal inputs give equal bytes.
    pub fn report_json(&self, config: &ExperimentConfig) -> String {
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "experiment": config.experiment.name(),
            "config": config.resolved(),
            "passed": self.passed(),
            "assertions": self.assertions,
            "results": self.results,
        });
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, config: &ExperimentConfig) -> io::Result<()> {
        write_file(&config.report_path(), &self.report_json(config))?;
        write_file(&config.results_csv_path(), &self.results_csv)?;
        write_file(&config.plot_csv_path(), &self.plot_csv)?;
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let meta = json!({
            "report": config.report_path().display().to_string(),
            "unix_time": stamp,
            "tool_version": env!("CARGO_PKG_VERSION"),
        });
        write_file(
            &config.meta_path(),
            &(serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n"),
        )
    }
}

fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)
}

/// Real number with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with a fixed header.
#[derive(Debug, Clone)]
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            out: header.join(",") + "\n",
        }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let cells: Vec<String> = cells.into_iter().map(Into::into).collect();
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// Plot data: `series,x,y`.
#[derive(Debug, Clone)]
pub struct PlotCsv(Csv);

impl Default for PlotCsv {
    fn default() -> Self {
        Self::new()
    }
}

impl PlotCsv {
    pub fn new() -> Self {
        Self(Csv::new(&["series", "x", "y"]))
    }

    pub fn point(&mut self, series: &str, x: f64, y: f64) {
        self.0.row([series.to_string(), real(x), real(y)]);
    }

    /// Point on the power axis `x = (1/2) log10 P`.
    pub fn at_power(&mut self, series: &str, p: f64, y: f64) {
        self.point(series, 0.5 * p.log10(), y);
    }

    pub fn finish(self) -> String {
        self.0.finish()
    }
}

/// Nats divided by `(1/2) ln P`.
pub fn dof(nats: f64, p: f64) -> f64 {
    nats / (0.5 * p.ln())
}
