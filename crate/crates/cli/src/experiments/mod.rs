//! The experiments behind `sdof run`.

mod helper;
mod interference;
mod mac;
mod tables;

use sdof_core::analysis::{fit_dof_slope, SlopeReport};
use sdof_core::seed::{mix, Domain};
use sdof_core::Result;

use crate::config::{Experiment, ExperimentConfig};
use crate::outcome::Outcome;

/// Runs the configured experiment. Errors from the numerical modules become
/// a failed outcome so that a report is still written.
pub fn execute(config: &ExperimentConfig) -> Outcome {
    let result = match config.experiment {
        Experiment::HelperFixedMc => helper::fixed_monte_carlo(config),
        Experiment::HelperFadingMi => helper::fading_information(config),
        Experiment::InterferenceFixedVerify => interference::fixed_verify(config),
        Experiment::InterferenceFadingVerify => interference::fading_verify(config),
        Experiment::InterferenceFadingMi => interference::fading_information(config),
        Experiment::MacPartial => mac::partial_csit(config),
        Experiment::Lemma2 => tables::lemma2(config),
        Experiment::SdofTable => tables::sdof_table(config),
        Experiment::Region => tables::region(config),
    };
    result.unwrap_or_else(|e| Outcome::aborted(e.to_string()))
}

/// Seed of the `index`-th draw in `domain`.
fn derived_seed(config: &ExperimentConfig, domain: Domain, index: u64) -> u64 {
    mix(config.seed, domain, index, 0)
}

/// Slope fitted on the largest `fit_points` powers of the grid.
fn fit_top(config: &ExperimentConfig, grid: &[f64], values: &[f64]) -> Result<SlopeReport> {
    let start = grid.len().saturating_sub(config.fit_points());
    fit_dof_slope(&grid[start..], &values[start..])
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}
