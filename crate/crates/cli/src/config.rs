//! Flat `key = value` experiment configuration with `--key=value` overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sdof_core::channel::GainDistribution;
use sdof_core::monomial_alignment::{BetaRule, DEFAULT_DECODE_BUDGET};
use serde::Serialize;
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "sdof-config/1";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("bad value for `{key}`: {reason}")]
    Value { key: String, reason: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("`{key}` = {value} outside the valid range {range} for {experiment}")]
    Range {
        key: &'static str,
        value: String,
        range: &'static str,
        experiment: Experiment,
    },
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    HelperFixedMc,
    HelperFadingMi,
    InterferenceFixedVerify,
    InterferenceFadingVerify,
    InterferenceFadingMi,
    MacPartial,
    Lemma2,
    SdofTable,
    Region,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::HelperFixedMc,
        Experiment::HelperFadingMi,
        Experiment::InterferenceFixedVerify,
        Experiment::InterferenceFadingVerify,
        Experiment::InterferenceFadingMi,
        Experiment::MacPartial,
        Experiment::Lemma2,
        Experiment::SdofTable,
        Experiment::Region,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::HelperFixedMc => "helper_fixed_mc",
            Experiment::HelperFadingMi => "helper_fading_mi",
            Experiment::InterferenceFixedVerify => "interference_fixed_verify",
            Experiment::InterferenceFadingVerify => "interference_fading_verify",
            Experiment::InterferenceFadingMi => "interference_fading_mi",
            Experiment::MacPartial => "mac_partial",
            Experiment::Lemma2 => "lemma2",
            Experiment::SdofTable => "sdof_table",
            Experiment::Region => "region",
        }
    }

    /// Keys the experiment reads, besides `experiment`, `seed` and outputs.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Experiment::HelperFixedMc => &[
                "M", "grid", "trials", "delta", "noise_variance", "decode_budget", "slope_tol",
                "gain_low", "gain_high", "sign_symmetric",
            ],
            Experiment::HelperFadingMi => &[
                "M", "grid", "fit_points", "realizations", "noise_variance", "slope_tol",
                "gain_low", "gain_high", "sign_symmetric",
            ],
            Experiment::InterferenceFixedVerify => &["K", "m", "beta_rule"],
            Experiment::InterferenceFadingVerify => &[
                "K", "n", "realizations", "rank_tol", "gain_low", "gain_high", "sign_symmetric",
            ],
            Experiment::InterferenceFadingMi => &[
                "K", "n", "grid", "fit_points", "realizations", "noise_variance", "slope_tol",
                "gain_low", "gain_high", "sign_symmetric",
            ],
            Experiment::MacPartial => &[
                "K", "m_informed", "grid", "fit_points", "realizations", "noise_variance",
                "slope_tol", "gain_low", "gain_high", "sign_symmetric",
            ],
            Experiment::Lemma2 => &["samples", "power", "gain_low", "gain_high", "sign_symmetric"],
            Experiment::SdofTable => &["K", "M", "m_informed"],
            Experiment::Region => &["K"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::UnknownExperiment(s.to_string()))
    }
}

/// Documentation for one key, used by the schema printer.
pub struct KeyDoc {
    pub key: &'static str,
    pub kind: &'static str,
    pub default: &'static str,
    pub about: &'static str,
}

pub const KEYS: &[KeyDoc] = &[
    KeyDoc { key: "experiment", kind: "name", default: "required", about: "one of the experiment names listed below" },
    KeyDoc { key: "seed", kind: "u64", default: "required", about: "master seed; every random draw derives from it" },
    KeyDoc { key: "K", kind: "integer", default: "3", about: "number of users" },
    KeyDoc { key: "M", kind: "integer", default: "1 (helper_fixed_mc), 2 otherwise", about: "number of helpers" },
    KeyDoc { key: "m", kind: "integer", default: "1", about: "fixed-gain interference exponent range 1..m" },
    KeyDoc { key: "m_informed", kind: "integer", default: "2", about: "transmitters with eavesdropper CSIT" },
    KeyDoc { key: "n", kind: "integer", default: "1", about: "fading precoder exponent range 1..n" },
    KeyDoc { key: "grid", kind: "comma-separated reals", default: "1e4,1e5,1e6,1e7 (helper_fixed_mc), 1e2,...,1e8 otherwise", about: "transmit powers P" },
    KeyDoc { key: "fit_points", kind: "integer", default: "4", about: "slopes are fitted on the largest fit_points grid powers" },
    KeyDoc { key: "trials", kind: "integer", default: "10000", about: "Monte Carlo trials per power" },
    KeyDoc { key: "realizations", kind: "integer", default: "10 (helper_fading_mi), 20 (interference_fading_verify), 1 otherwise", about: "seeded channel realizations" },
    KeyDoc { key: "samples", kind: "integer", default: "200", about: "sampled gains for the conditional-entropy bound" },
    KeyDoc { key: "power", kind: "real", default: "1e4", about: "power for the conditional-entropy bound" },
    KeyDoc { key: "delta", kind: "real in (0,1)", default: "0.05", about: "PAM rate backoff" },
    KeyDoc { key: "beta_rule", kind: "general|three_user", default: "general", about: "jamming block scaling of the fixed-gain interference scheme" },
    KeyDoc { key: "rank_tol", kind: "real", default: "1e-10", about: "relative singular value tolerance" },
    KeyDoc { key: "slope_tol", kind: "real", default: "0.1 (helper_fixed_mc), 0.05 otherwise", about: "allowed slope deviation" },
    KeyDoc { key: "noise_variance", kind: "real", default: "1", about: "receiver noise variance" },
    KeyDoc { key: "decode_budget", kind: "integer", default: "10000000", about: "cap on nearest-point decoder enumeration" },
    KeyDoc { key: "gain_low", kind: "real", default: "0.5", about: "smallest gain magnitude" },
    KeyDoc { key: "gain_high", kind: "real", default: "2", about: "largest gain magnitude" },
    KeyDoc { key: "sign_symmetric", kind: "bool", default: "true", about: "draw gains with a random sign" },
    KeyDoc { key: "output_dir", kind: "path", default: ".", about: "directory for outputs without an explicit path" },
    KeyDoc { key: "report", kind: "path", default: "<output_dir>/<experiment>.json", about: "structured JSON report" },
    KeyDoc { key: "results_csv", kind: "path", default: "<output_dir>/<experiment>.csv", about: "tabular results" },
    KeyDoc { key: "plot_csv", kind: "path", default: "<output_dir>/<experiment>_plot.csv", about: "plot data" },
];

/// Validated experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub k: Option<usize>,
    pub helpers: Option<usize>,
    pub m: Option<usize>,
    pub m_informed: Option<usize>,
    pub n: Option<usize>,
    pub grid: Option<Vec<f64>>,
    pub fit_points: Option<usize>,
    pub trials: Option<u64>,
    pub realizations: Option<u64>,
    pub samples: Option<u64>,
    pub power: Option<f64>,
    pub delta: Option<f64>,
    pub beta_rule: Option<BetaRule>,
    pub rank_tol: Option<f64>,
    pub slope_tol: Option<f64>,
    pub noise_variance: Option<f64>,
    pub decode_budget: Option<u64>,
    pub gain_low: Option<f64>,
    pub gain_high: Option<f64>,
    pub sign_symmetric: Option<bool>,
    pub output_dir: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub results_csv: Option<PathBuf>,
    pub plot_csv: Option<PathBuf>,
}

/// Raw key-value pairs in file order, later overrides replacing earlier values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.trim().to_string(),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1, text: raw.trim().to_string() });
            }
            check_key(k)?;
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ConfigError::Duplicate(k.to_string()));
            }
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Applies `--key=value` arguments.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, args: &[S]) -> Result<(), ConfigError> {
        for arg in args {
            let arg = arg.as_ref();
            let body = arg.strip_prefix("--").ok_or_else(|| ConfigError::Syntax {
                line: 0,
                text: arg.to_string(),
            })?;
            let (k, v) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: 0,
                text: arg.to_string(),
            })?;
            check_key(k)?;
            self.entries.insert(k.to_string(), v.trim().to_string());
        }
        Ok(())
    }

    pub fn into_config(self) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::from_raw(&self)
    }
}

fn check_key(k: &str) -> Result<(), ConfigError> {
    if KEYS.iter().any(|d| d.key == k) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey(k.to_string()))
    }
}

fn value_err(key: &str, reason: impl fmt::Display) -> ConfigError {
    ConfigError::Value { key: key.to_string(), reason: reason.to_string() }
}

fn get<T: FromStr>(raw: &RawConfig, key: &str) -> Result<Option<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    raw.entries
        .get(key)
        .map(|v| v.parse::<T>().map_err(|e| value_err(key, format!("`{v}`: {e}"))))
        .transpose()
}

fn parse_grid(v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| value_err("grid", format!("`{}`: {e}", s.trim())))
        })
        .collect()
}

fn parse_beta_rule(v: &str) -> Result<BetaRule, ConfigError> {
    match v {
        "general" => Ok(BetaRule::General),
        "three_user" => Ok(BetaRule::ThreeUser),
        other => Err(value_err("beta_rule", format!("`{other}` is not general or three_user"))),
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let experiment: Experiment = raw
            .entries
            .get("experiment")
            .ok_or(ConfigError::Missing("experiment"))?
            .parse()?;
        let seed = get::<u64>(raw, "seed")?.ok_or(ConfigError::Missing("seed"))?;
        let config = Self {
            experiment,
            seed,
            k: get(raw, "K")?,
            helpers: get(raw, "M")?,
            m: get(raw, "m")?,
            m_informed: get(raw, "m_informed")?,
            n: get(raw, "n")?,
            grid: raw.entries.get("grid").map(|v| parse_grid(v)).transpose()?,
            fit_points: get(raw, "fit_points")?,
            trials: get(raw, "trials")?,
            realizations: get(raw, "realizations")?,
            samples: get(raw, "samples")?,
            power: get(raw, "power")?,
            delta: get(raw, "delta")?,
            beta_rule: raw.entries.get("beta_rule").map(|v| parse_beta_rule(v)).transpose()?,
            rank_tol: get(raw, "rank_tol")?,
            slope_tol: get(raw, "slope_tol")?,
            noise_variance: get(raw, "noise_variance")?,
            decode_budget: get(raw, "decode_budget")?,
            gain_low: get(raw, "gain_low")?,
            gain_high: get(raw, "gain_high")?,
            sign_symmetric: get(raw, "sign_symmetric")?,
            output_dir: get(raw, "output_dir")?,
            report: get(raw, "report")?,
            results_csv: get(raw, "results_csv")?,
            plot_csv: get(raw, "plot_csv")?,
        };
        config.validate()?;
        Ok(config)
    }

    /// Minimal configuration for `experiment`; everything else defaults.
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        Self {
            experiment,
            seed,
            k: None,
            helpers: None,
            m: None,
            m_informed: None,
            n: None,
            grid: None,
            fit_points: None,
            trials: None,
            realizations: None,
            samples: None,
            power: None,
            delta: None,
            beta_rule: None,
            rank_tol: None,
            slope_tol: None,
            noise_variance: None,
            decode_budget: None,
            gain_low: None,
            gain_high: None,
            sign_symmetric: None,
            output_dir: None,
            report: None,
            results_csv: None,
            plot_csv: None,
        }
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(3)
    }

    pub fn helpers(&self) -> usize {
        self.helpers.unwrap_or(match self.experiment {
            Experiment::HelperFixedMc => 1,
            _ => 2,
        })
    }

    pub fn m(&self) -> usize {
        self.m.unwrap_or(1)
    }

    pub fn m_informed(&self) -> usize {
        self.m_informed.unwrap_or(2)
    }

    pub fn n(&self) -> usize {
        self.n.unwrap_or(1)
    }

    pub fn grid(&self) -> Vec<f64> {
        self.grid.clone().unwrap_or_else(|| match self.experiment {
            Experiment::HelperFixedMc => vec![1e4, 1e5, 1e6, 1e7],
            _ => sdof_core::analysis::default_power_grid(),
        })
    }

    pub fn fit_points(&self) -> usize {
        self.fit_points.unwrap_or(4)
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or(10_000)
    }

    pub fn realizations(&self) -> u64 {
        self.realizations.unwrap_or(match self.experiment {
            Experiment::HelperFadingMi => 10,
            Experiment::InterferenceFadingVerify => 20,
            _ => 1,
        })
    }

    pub fn samples(&self) -> u64 {
        self.samples.unwrap_or(200)
    }

    pub fn power(&self) -> f64 {
        self.power.unwrap_or(1e4)
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(0.05)
    }

    pub fn beta_rule(&self) -> BetaRule {
        self.beta_rule.unwrap_or_default()
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol.unwrap_or(1e-10)
    }

    pub fn slope_tol(&self) -> f64 {
        self.slope_tol.unwrap_or(match self.experiment {
            Experiment::HelperFixedMc => 0.1,
            _ => 0.05,
        })
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance.unwrap_or(1.0)
    }

    pub fn decode_budget(&self) -> u64 {
        self.decode_budget.unwrap_or(DEFAULT_DECODE_BUDGET)
    }

    pub fn distribution(&self) -> GainDistribution {
        let d = GainDistribution::default();
        GainDistribution {
            magnitude_low: self.gain_low.unwrap_or(d.magnitude_low),
            magnitude_high: self.gain_high.unwrap_or(d.magnitude_high),
            sign_symmetric: self.sign_symmetric.unwrap_or(d.sign_symmetric),
        }
    }

    fn output_path(&self, explicit: &Option<PathBuf>, suffix: &str) -> PathBuf {
        explicit.clone().unwrap_or_else(|| {
            self.output_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("."))
                .join(format!("{}{suffix}", self.experiment.name()))
        })
    }

    pub fn report_path(&self) -> PathBuf {
        self.output_path(&self.report, ".json")
    }

    pub fn results_csv_path(&self) -> PathBuf {
        self.output_path(&self.results_csv, ".csv")
    }

    pub fn plot_csv_path(&self) -> PathBuf {
        self.output_path(&self.plot_csv, "_plot.csv")
    }

    /// Metadata sidecar next to the report.
    pub fn meta_path(&self) -> PathBuf {
        let report = self.report_path();
        let stem = report
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.experiment.name().to_string());
        report.with_file_name(format!("{stem}.meta.json"))
    }

    /// Resolved values of the keys the experiment reads, in key order.
    pub fn resolved(&self) -> BTreeMap<&'static str, String> {
        let mut out = BTreeMap::new();
        out.insert("experiment", self.experiment.name().to_string());
        out.insert("seed", self.seed.to_string());
        for &key in self.experiment.keys() {
            let v = match key {
                "K" => self.k().to_string(),
                "M" => self.helpers().to_string(),
                "m" => self.m().to_string(),
                "m_informed" => self.m_informed().to_string(),
                "n" => self.n().to_string(),
                "grid" => self
                    .grid()
                    .iter()
                    .map(|p| format!("{p:e}"))
                    .collect::<Vec<_>>()
                    .join(","),
                "fit_points" => self.fit_points().to_string(),
                "trials" => self.trials().to_string(),
                "realizations" => self.realizations().to_string(),
                "samples" => self.samples().to_string(),
                "power" => format!("{:e}", self.power()),
                "delta" => self.delta().to_string(),
                "beta_rule" => match self.beta_rule() {
                    BetaRule::General => "general".into(),
                    BetaRule::ThreeUser => "three_user".into(),
                },
                "rank_tol" => format!("{:e}", self.rank_tol()),
                "slope_tol" => self.slope_tol().to_string(),
                "noise_variance" => self.noise_variance().to_string(),
                "decode_budget" => self.decode_budget().to_string(),
                "gain_low" => self.distribution().magnitude_low.to_string(),
                "gain_high" => self.distribution().magnitude_high.to_string(),
                "sign_symmetric" => self.distribution().sign_symmetric.to_string(),
                _ => unreachable!("undocumented key {key}"),
            };
            out.insert(key, v);
        }
        out
    }

    fn range<T: PartialOrd + fmt::Display>(
        &self,
        key: &'static str,
        value: T,
        lo: T,
        hi: T,
        range: &'static str,
    ) -> Result<(), ConfigError> {
        if value < lo || value > hi {
            return Err(ConfigError::Range {
                key,
                value: value.to_string(),
                range,
                experiment: self.experiment,
            });
        }
        Ok(())
    }

    /// Checks every parameter the experiment reads against its valid range.
    pub fn validate(&self) -> Result<(), ConfigError> {
        use Experiment::*;
        let e = self.experiment;
        let keys = e.keys();
        let has = |k: &str| keys.contains(&k);
        if has("K") {
            match e {
                InterferenceFixedVerify => self.range("K", self.k(), 3, 5, "3..=5")?,
                InterferenceFadingVerify | InterferenceFadingMi => {
                    self.range("K", self.k(), 3, 4, "3..=4")?
                }
                MacPartial => self.range("K", self.k(), 2, 12, "2..=12")?,
                _ => self.range("K", self.k(), 1, 1000, "1..=1000")?,
            }
        }
        if has("M") {
            match e {
                HelperFixedMc => self.range("M", self.helpers(), 1, 3, "1..=3")?,
                HelperFadingMi => self.range("M", self.helpers(), 1, 16, "1..=16")?,
                _ => self.range("M", self.helpers(), 0, 1000, "0..=1000")?,
            }
        }
        if has("m") {
            let hi = match self.k() {
                3 => 3,
                _ => 1,
            };
            self.range("m", self.m(), 1, hi, "1..=3 for K=3, 1 for K>3")?;
        }
        if has("m_informed") {
            self.range("m_informed", self.m_informed(), 1, self.k(), "1..=K")?;
        }
        if has("n") {
            let hi = match self.k() {
                3 => 3,
                _ => 1,
            };
            self.range("n", self.n(), 1, hi, "1..=3 for K=3, 1 for K=4")?;
        }
        if has("grid") {
            let grid = self.grid();
            if grid.is_empty() || grid.iter().any(|p| !(*p > 1.0 && p.is_finite())) {
                return Err(value_err("grid", "powers must be finite and > 1"));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(value_err("grid", "powers must be strictly increasing"));
            }
        }
        if has("fit_points") {
            self.range("fit_points", self.fit_points(), 3, self.grid().len().max(3), "3..=grid length")?;
        }
        if has("trials") {
            self.range("trials", self.trials(), 1, 100_000_000, "1..=1e8")?;
        }
        if has("realizations") {
            self.range("realizations", self.realizations(), 1, 10_000, "1..=10000")?;
        }
        if has("samples") {
            self.range("samples", self.samples(), 1, 100_000, "1..=100000")?;
        }
        if has("power") {
            self.range("power", self.power(), 4.0, 1e12, "4..=1e12")?;
        }
        if has("delta") && !(self.delta() > 0.0 && self.delta() < 1.0) {
            return Err(value_err("delta", "must be in (0, 1)"));
        }
        if has("rank_tol") && !(self.rank_tol() > 0.0 && self.rank_tol() < 1.0) {
            return Err(value_err("rank_tol", "must be in (0, 1)"));
        }
        if has("slope_tol") && !(self.slope_tol() > 0.0 && self.slope_tol().is_finite()) {
            return Err(value_err("slope_tol", "must be positive"));
        }
        if has("noise_variance") {
            let v = self.noise_variance();
            let ok = if e == HelperFixedMc { v >= 0.0 } else { v > 0.0 };
            if !(ok && v.is_finite()) {
                return Err(value_err("noise_variance", "must be finite and positive (zero allowed for Monte Carlo)"));
            }
        }
        if has("decode_budget") && self.decode_budget() == 0 {
            return Err(value_err("decode_budget", "must be >= 1"));
        }
        if has("gain_low") {
            self.distribution()
                .validate()
                .map_err(|err| value_err("gain_low", err))?;
        }
        if matches!(e, InterferenceFixedVerify) && self.beta_rule() == BetaRule::ThreeUser && self.k() != 3 {
            return Err(value_err("beta_rule", "three_user applies only to K = 3"));
        }
        Ok(())
    }
}

/// Human-readable description of config keys, experiments and outputs.
pub fn schema_text() -> String {
    let mut s = String::new();
    s.push_str(&format!("schema_version: {SCHEMA_VERSION}\n\n"));
    s.push_str("Config files hold one `key = value` per line; `#` starts a comment.\n");
    s.push_str("Command-line arguments `--key=value` override file entries.\n\n");
    s.push_str("KEYS\n");
    for d in KEYS {
        s.push_str(&format!("  {:<15} {:<22} default: {}\n", d.key, d.kind, d.default));
        s.push_str(&format!("  {:<15} {}\n", "", d.about));
    }
    s.push_str("\nEXPERIMENTS (keys read besides experiment, seed and outputs)\n");
    for e in Experiment::ALL {
        s.push_str(&format!("  {:<27} {}\n", e.name(), e.keys().join(", ")));
    }
    s.push_str(
        "\nOUTPUTS\n  \
         report       JSON: schema_version, experiment, config (resolved values), passed,\n               \
         assertions [{name, passed, detail}], results. Byte-identical for equal config and seed.\n  \
         results_csv  tabular results; '.' decimal point, reals with 17 significant digits.\n  \
         plot_csv     x,y,series rows; x = (1/2) log10 P, y = measured d.o.f. or error rate.\n  \
         <report stem>.meta.json  timestamp and tool version, kept out of the report.\n\n\
         EXIT CODES\n  0 all assertions pass, 1 an assertion failed (report still written), 2 usage error.\n  \
         SDOF_THREADS caps worker threads.\n\n",
    );
    s.push_str("EXAMPLE\n");
    s.push_str(EXAMPLE);
    s
}

/// A complete config accepted by the parser.
pub const EXAMPLE: &str = "experiment = interference_fading_verify\nseed = 1\nK = 3\nn = 1\nrealizations = 20\nrank_tol = 1e-10\noutput_dir = results\n";

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        RawConfig::parse(text)?.into_config()
    }

    #[test]
    fn parses_comments_and_overrides() {
        let mut raw = RawConfig::parse("# header\nexperiment = helper_fading_mi  # trailing\nseed=7\nM = 3\n").unwrap();
        raw.apply_overrides(&["--M=1", "--grid=1e5,1e6,1e7,1e8"]).unwrap();
        let c = raw.into_config().unwrap();
        assert_eq!(c.experiment, Experiment::HelperFadingMi);
        assert_eq!(c.seed, 7);
        assert_eq!(c.helpers(), 1);
        assert_eq!(c.grid(), vec![1e5, 1e6, 1e7, 1e8]);
        assert_eq!(c.realizations(), 10);
    }

    #[test]
    fn seed_and_experiment_required() {
        assert_eq!(parse("experiment = region\n"), Err(ConfigError::Missing("seed")));
        assert_eq!(parse("seed = 1\n"), Err(ConfigError::Missing("experiment")));
        assert_eq!(
            parse("experiment = bogus\nseed = 1\n"),
            Err(ConfigError::UnknownExperiment("bogus".into()))
        );
    }

    #[test]
    fn rejects_bad_lines_and_values() {
        assert!(matches!(parse("experiment region"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(parse("colour = red"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(parse("seed=1\nseed=2"), Err(ConfigError::Duplicate(_))));
        assert!(matches!(parse("experiment=region\nseed=-1"), Err(ConfigError::Value { .. })));
        assert!(matches!(
            parse("experiment=interference_fixed_verify\nseed=1\nK=9"),
            Err(ConfigError::Range { key: "K", .. })
        ));
        assert!(matches!(
            parse("experiment=mac_partial\nseed=1\nK=3\nm_informed=4"),
            Err(ConfigError::Range { key: "m_informed", .. })
        ));
        assert!(matches!(
            parse("experiment=helper_fading_mi\nseed=1\ngrid=1e5,1e4,1e6"),
            Err(ConfigError::Value { .. })
        ));
        let mut raw = RawConfig::default();
        assert!(raw.apply_overrides(&["M=1"]).is_err());
        assert!(raw.apply_overrides(&["--M"]).is_err());
    }

    #[test]
    fn schema_lists_every_key_and_example_parses() {
        let s = schema_text();
        assert!(s.contains(SCHEMA_VERSION));
        for d in KEYS {
            assert!(s.contains(d.key), "{}", d.key);
        }
        for e in Experiment::ALL {
            assert!(s.contains(e.name()));
            for k in e.keys() {
                assert!(KEYS.iter().any(|d| d.key == *k));
            }
        }
        let example = s.split("EXAMPLE\n").nth(1).unwrap();
        let c = parse(example).unwrap();
        assert_eq!(c.experiment, Experiment::InterferenceFadingVerify);
        assert_eq!(c.report_path(), PathBuf::from("results/interference_fading_verify.json"));
        assert_eq!(c.meta_path(), PathBuf::from("results/interference_fading_verify.meta.json"));
    }

    #[test]
    fn resolved_covers_experiment_keys() {
        for e in Experiment::ALL {
            let c = ExperimentConfig::new(e, 1);
            c.validate().unwrap();
            assert_eq!(c.resolved().len(), e.keys().len() + 2);
        }
    }
}
