//! MAC with eavesdropper CSIT at some transmitters.

use num_rational::Rational64;
use rand::Rng;
use rayon::prelude::*;
use sdof_core::analysis::{sdof_formula, SchemeInformation, SchemeRef, SdofQuery};
use sdof_core::channel::{sample_channel, ChannelModel};
use sdof_core::precoding::build_partial_csit_fading;
use sdof_core::seed::{substream, Domain};
use sdof_core::Result;
use serde_json::json;

use super::{derived_seed, fit_top, mean};
use crate::config::ExperimentConfig;
use crate::outcome::{dof, real, Assertion, Csv, Outcome, PlotCsv};

struct Run {
    decoded: usize,
    legit: Vec<f64>,
    leak: Vec<f64>,
    legit_slope: f64,
    leak_slope: f64,
}

pub fn partial_csit(config: &ExperimentConfig) -> Result<Outcome> {
    let (k, informed) = (config.k(), config.m_informed());
    let grid = config.grid();
    let sigma2 = config.noise_variance();
    let messages = informed * (k - 1);
    let slots = messages + 1;
    let runs = (0..config.realizations())
        .into_par_iter()
        .map(|r| -> Result<Run> {
            let realization = sample_channel(
                ChannelModel::MacPartial { users: k, informed },
                config.distribution(),
                slots,
                false,
                derived_seed(config, Domain::Realization, r),
            )?;
            let scheme = build_partial_csit_fading(k, informed, &realization)?;
            let mut rng = substream(config.seed, Domain::Symbols, r, 0);
            let symbols: Vec<f64> = (0..messages + k)
                .map(|_| rng.random_range(-50i64..=50) as f64)
                .collect();
            let estimates = scheme.zero_force_decode(&scheme.receive(&symbols)?)?;
            let decoded = estimates
                .iter()
                .zip(&symbols)
                .filter(|(e, s)| e.round() == **s)
                .count();
            let info = SchemeInformation::of(SchemeRef::PartialCsit(&scheme))?;
            let values = grid
                .iter()
                .map(|&p| info.at(p, sigma2))
                .collect::<Result<Vec<_>>>()?;
            let legit: Vec<f64> = values.iter().map(|v| v.legit_nats[0]).collect();
            let leak: Vec<f64> = values.iter().map(|v| v.leak_nats).collect();
            Ok(Run {
                decoded,
                legit_slope: fit_top(config, &grid, &legit)?.slope,
                leak_slope: fit_top(config, &grid, &leak)?.slope,
                legit,
                leak,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let formula = sdof_formula(SdofQuery::MacPartial {
        users: k as u32,
        m_informed: informed as u32,
    })?;
    let accounting = Rational64::new(messages as i64, slots as i64);
    let decoded_ok = runs.iter().all(|r| r.decoded == messages);
    let leak_dev = runs.iter().map(|r| r.leak_slope.abs()).fold(0.0, f64::max);
    let legit_dev = runs
        .iter()
        .map(|r| (r.legit_slope - messages as f64).abs())
        .fold(0.0, f64::max);
    let tol = config.slope_tol();

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
    }
    Ok(Outcome {
        assertions: vec![
            Assertion::new(
                "zero_noise_decoding",
                decoded_ok,
                format!(
                    "decoded {:?} of {messages} message streams",
                    runs.iter().map(|r| r.decoded).collect::<Vec<_>>()
                ),
            ),
            Assertion::new(
                "leak_slope",
                leak_dev <= tol,
                format!("max |slope| = {leak_dev:.4}"),
            ),
            Assertion::new(
                "dimension_accounting",
                accounting == formula,
                format!("{messages} messages over {slots} slots = {accounting}, formula {formula}"),
            ),
        ],
        results: json!({
            "K": k,
            "m_informed": informed,
            "messages": messages,
            "slots": slots,
            "sdof_formula": formula.to_string(),
            "max_legit_slope_deviation": legit_dev,
            "realizations": runs.iter().map(|r| json!({
                "decoded": r.decoded,
                "legit_slope": r.legit_slope,
                "leak_slope": r.leak_slope,
            })).collect::<Vec<_>>(),
        }),
        results_csv: csv.finish(),
        plot_csv: plot.finish(),
    })
}
