//! Wiretap channel with helpers: fixed-gain Monte Carlo and fading
//! mutual-information slopes.

use num_rational::Rational64;
use rayon::prelude::*;
use sdof_core::analysis::{
    monte_carlo_error_rate, sdof_formula, ErrorRateOptions, SchemeInformation, SchemeRef, SdofQuery,
};
use sdof_core::channel::{sample_channel, ChannelModel};
use sdof_core::linalg::numeric_rank;
use sdof_core::monomial_alignment::{build_helper_scheme, PamScheme};
use sdof_core::precoding::build_helper_fading;
use sdof_core::seed::Domain;
use sdof_core::Result;
use serde_json::json;

use super::{derived_seed, fit_top, mean};
use crate::outcome::{dof, real, Assertion, Csv, Outcome, PlotCsv};

pub fn fixed_monte_carlo(config: &crate::config::ExperimentConfig) -> Result<Outcome> {
    let helpers = config.helpers();
    let grid = config.grid();
    let model = ChannelModel::Helper { helpers };
    let realization = sample_channel(
        model,
        config.distribution(),
        1,
        true,
        derived_seed(config, Domain::Realization, 0),
    )?;
    let layout = build_helper_scheme(helpers, &realization, derived_seed(config, Domain::Alpha, 0))?;
    let estimates = grid
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let scheme = PamScheme::with_power(layout.clone(), p, config.delta())?;
            let options = ErrorRateOptions {
                trials: config.trials(),
                seed: derived_seed(config, Domain::Symbols, i as u64),
                noise_variance: config.noise_variance(),
                decode_budget: config.decode_budget(),
            };
            monte_carlo_error_rate(&scheme, &options)
        })
        .collect::<Result<Vec<_>>>()?;

    let rates: Vec<f64> = estimates.iter().map(|e| e.rate.unwrap_or(1.0)).collect();
    let reliable: Vec<f64> = estimates
        .iter()
        .map(|e| e.reliable_rate_nats.unwrap_or(0.0))
        .collect();
    let target = sdof_formula(SdofQuery::Helper { helpers: helpers as u32 })?;
    let fit = sdof_core::analysis::fit_dof_slope(&grid, &reliable)?.with_target(target);
    let deviation = fit.deviation().unwrap_or(f64::INFINITY);
    let monotone = rates.windows(2).all(|w| w[1] <= w[0]);

    let mut csv = Csv::new(&["P", "Q", "a", "trials", "errors", "error_rate", "reliable_rate_nats"]);
    let mut plot = PlotCsv::new();
    for (e, (&rate, &rel)) in estimates.iter().zip(rates.iter().zip(&reliable)) {
        csv.row([
            real(e.p),
            e.q.to_string(),
            real(e.a),
            e.trials.to_string(),
            e.errors.to_string(),
            real(rate),
            real(rel),
        ]);
        plot.at_power("error_rate", e.p, rate);
        plot.at_power("reliable_dof", e.p, dof(rel, e.p));
    }
    Ok(Outcome {
        assertions: vec![
            Assertion::new(
                "error_rate_nonincreasing",
                monotone,
                format!("error rates {rates:?}"),
            ),
            Assertion::new(
                "reliable_rate_slope",
                deviation <= config.slope_tol(),
                format!(
                    "slope {:.4} vs target {} (deviation {:.4}, tolerance {})",
                    fit.slope,
                    target,
                    deviation,
                    config.slope_tol()
                ),
            ),
        ],
        results: json!({
            "estimates": estimates,
            "reliable_rate_fit": fit,
        }),
        results_csv: csv.finish(),
        plot_csv: plot.finish(),
    })
}

struct FadingRun {
    legit: Vec<f64>,
    leak: Vec<f64>,
    legit_slope: f64,
    leak_slope: f64,
    message_rank: usize,
    attempts: u64,
}

pub fn fading_information(config: &crate::config::ExperimentConfig) -> Result<Outcome> {
    let helpers = config.helpers();
    let grid = config.grid();
    let sigma2 = config.noise_variance();
    let runs = (0..config.realizations())
        .into_par_iter()
        .map(|r| -> Result<FadingRun> {
            let realization = sample_channel(
                ChannelModel::Helper { helpers },
                config.distribution(),
                helpers + 1,
                false,
                derived_seed(config, Domain::Realization, r),
            )?;
            let scheme = build_helper_fading(helpers, &realization, derived_seed(config, Domain::Alpha, r))?;
            let info = SchemeInformation::of(SchemeRef::Helper(&scheme))?;
            let values = grid
                .iter()
                .map(|&p| info.at(p, sigma2))
                .collect::<Result<Vec<_>>>()?;
            let legit: Vec<f64> = values.iter().map(|v| v.legit_nats[0]).collect();
            let leak: Vec<f64> = values.iter().map(|v| v.leak_nats).collect();
            Ok(FadingRun {
                legit_slope: fit_top(config, &grid, &legit)?.slope,
                leak_slope: fit_top(config, &grid, &leak)?.slope,
                legit,
                leak,
                message_rank: numeric_rank(&scheme.a_v, 1e-10),
                attempts: scheme.attempts,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let tol = config.slope_tol();
    let legit_dev = runs
        .iter()
        .map(|r| (r.legit_slope - helpers as f64).abs())
        .fold(0.0, f64::max);
    let leak_dev = runs.iter().map(|r| r.leak_slope.abs()).fold(0.0, f64::max);
    let slots = helpers + 1;
    let accounting = Rational64::new(helpers as i64, slots as i64);
    let formula = sdof_formula(SdofQuery::Helper { helpers: helpers as u32 })?;
    let full_rank = runs.iter().all(|r| r.message_rank == helpers);

    let mut csv = Csv::new(&["realization", "P", "legit_nats", "leak_nats"]);
    let mut plot = PlotCsv::new();
    for (i, run) in runs.iter().enumerate() {
        for (j, &p) in grid.iter().enumerate() {
            csv.row([i.to_string(), real(p), real(run.legit[j]), real(run.leak[j])]);
        }
    }
    for (j, &p) in grid.iter().enumerate() {
        plot.at_power("legit_dof", p, dof(mean(runs.iter().map(|r| r.legit[j])), p));
        plot.at_power("leak_dof", p, dof(mean(runs.iter().map(|r| r.leak[j])), p));
        plot.at_power(
            "secrecy_dof_per_slot",
            p,
            dof(mean(runs.iter().map(|r| r.legit[j] - r.leak[j])), p) / slots as f64,
        );
    }
    let fit_grid = &grid[grid.len().saturating_sub(config.fit_points())..];
    Ok(Outcome {
        assertions: vec![
            Assertion::new(
                "legit_slope",
                legit_dev <= tol,
                format!("max |slope - {helpers}| = {legit_dev:.4} over {} realizations", runs.len()),
            ),
            Assertion::new(
                "leak_slope",
                leak_dev <= tol,
                format!("max |slope| = {leak_dev:.4} over {} realizations", runs.len()),
            ),
            Assertion::new(
                "dimension_accounting",
                accounting == formula && full_rank,
                format!("{helpers} message dimensions over {slots} slots = {accounting}, formula {formula}"),
            ),
        ],
        results: json!({
            "M": helpers,
            "slots": slots,
            "fit_grid": fit_grid,
            "sdof": accounting.to_string(),
            "realizations": runs.iter().enumerate().map(|(i, r)| json!({
                "index": i,
                "alpha_attempts": r.attempts,
                "message_rank": r.message_rank,
                "legit_slope": r.legit_slope,
                "leak_slope": r.leak_slope,
            })).collect::<Vec<_>>(),
        }),
        results_csv: csv.finish(),
        plot_csv: plot.finish(),
    })
}
