//! Exact tables: the conditional-entropy bound, s.d.o.f. formulas and the
//! MAC region.

use num_rational::Rational64;
use sdof_core::analysis::{mac_sdof_region, sdof_formula, sdof_formula_with_csit, SdofQuery};
use sdof_core::converse::{lemma2_conditional_entropy, lemma2_expectation_check, DEFAULT_LEMMA2_BUDGET};
use sdof_core::seed::Domain;
use sdof_core::Result;
use serde_json::json;

use super::derived_seed;
use crate::config::ExperimentConfig;
use crate::outcome::{real, Assertion, Csv, Outcome, PlotCsv};

pub fn lemma2(config: &ExperimentConfig) -> Result<Outcome> {
    let exact = lemma2_conditional_entropy(0.5, 16.0, DEFAULT_LEMMA2_BUDGET)?;
    let expected = 0.8 * std::f64::consts::LN_2;
    let exact_ok = (exact.h_exact_nats - expected).abs() <= 1e-12 && !exact.violated;
    let check = lemma2_expectation_check(
        &config.distribution(),
        config.power(),
        config.samples(),
        derived_seed(config, Domain::Lemma2, 0),
        DEFAULT_LEMMA2_BUDGET,
    )?;
    let strict = check
        .reports
        .iter()
        .filter(|r| (r.max_bin as f64 - 1.0) * r.h.abs() >= 1.0)
        .count();

    let mut csv = Csv::new(&["sample", "h", "H_exact_nats", "bound_nats", "max_bin", "violated"]);
    let mut plot = PlotCsv::new();
    for (i, r) in check.reports.iter().enumerate() {
        csv.row([
            i.to_string(),
            real(r.h),
            real(r.h_exact_nats),
            real(r.bound_nats),
            r.max_bin.to_string(),
            r.violated.to_string(),
        ]);
        plot.point("H_exact_nats", r.h, r.h_exact_nats);
        plot.point("bound_nats", r.h, r.bound_nats);
    }
    Ok(Outcome {
        assertions: vec![
            Assertion::new(
                "enumerated_case",
                exact_ok,
                format!(
                    "h = 0.5, P = 16: H = {} nats, expected (4/5) ln 2 = {expected}",
                    exact.h_exact_nats
                ),
            ),
            Assertion::new(
                "entropy_bound",
                check.per_sample_violations == 0,
                format!("{} of {} samples violate", check.per_sample_violations, check.samples),
            ),
            Assertion::new(
                "bin_size_bound",
                strict == 0,
                format!("{strict} samples with (max_bin - 1)|h| >= 1"),
            ),
            Assertion::new(
                "averaged_bound",
                check.averaged_ok,
                format!(
                    "mean H {:?} vs mean bound {:?}",
                    check.mean_h_exact_nats, check.mean_bound_nats
                ),
            ),
        ],
        results: json!({ "enumerated_case": exact, "expectation": check }),
        results_csv: csv.finish(),
        plot_csv: plot.finish(),
    })
}

/// Largest user count for the CSIT-loss sweep.
const LOSS_SWEEP_MAX_K: u32 = 100;

pub fn sdof_table(config: &ExperimentConfig) -> Result<Outcome> {
    let k = config.k() as u32;
    let helpers = config.helpers() as u32;
    let rat = |n: u32, d: u32| Rational64::new(n as i64, d as i64);
    let queries = [
        SdofQuery::Helper { helpers },
        SdofQuery::Mac { users: k },
        SdofQuery::Interference { users: k },
    ];
    let closed = [
        (rat(helpers, helpers + 1), rat(helpers, helpers + 1)),
        (rat(k - 1, k), rat(k * (k - 1), k * (k - 1) + 1)),
        (rat(k - 1, 2), rat(k * (k - 1), 2 * k - 1)),
    ];
    let rows = queries
        .iter()
        .map(|&q| sdof_formula_with_csit(q))
        .collect::<Result<Vec<_>>>()?;
    let table_ok = rows
        .iter()
        .zip(&closed)
        .all(|(r, (without, with))| r.without_csit.0 == *without && r.with_csit.0 == *with);

    let mut loss_failures = Vec::new();
    let mut plot = PlotCsv::new();
    for users in 2..=LOSS_SWEEP_MAX_K {
        let c = sdof_formula_with_csit(SdofQuery::Interference { users })?;
        let closed_loss = rat(users - 1, 2 * (2 * users - 1));
        if c.loss.0 != closed_loss || c.loss_within_quarter != Some(true) {
            loss_failures.push(users);
        }
        plot.point("interference_csit_loss", users as f64, c.loss.to_f64());
    }

    let informed = config.m_informed().min(config.k()) as u32;
    let partial = sdof_formula(SdofQuery::MacPartial { users: k, m_informed: informed })?;
    let partial_ok = partial == rat(informed * (k - 1), informed * (k - 1) + 1);

    let mut csv = Csv::new(&["model", "parameter", "without_csit", "with_csit", "loss"]);
    for (r, q) in rows.iter().zip(&queries) {
        let (model, parameter) = match *q {
            SdofQuery::Helper { helpers } => ("helper", format!("M={helpers}")),
            SdofQuery::Mac { users } => ("mac", format!("K={users}")),
            SdofQuery::Interference { users } => ("interference", format!("K={users}")),
            SdofQuery::MacPartial { .. } => unreachable!(),
        };
        csv.row([
            model.to_string(),
            parameter,
            r.without_csit.to_string(),
            r.with_csit.to_string(),
            r.loss.to_string(),
        ]);
    }
    Ok(Outcome {
        assertions: vec![
            Assertion::new(
                "table_formulas",
                table_ok,
                format!("six formulas at K = {k}, M = {helpers}"),
            ),
            Assertion::new(
                "interference_csit_loss",
                loss_failures.is_empty(),
                format!(
                    "loss (K-1)/(2(2K-1)) <= 1/4 for K = 2..={LOSS_SWEEP_MAX_K}; failures {loss_failures:?}"
                ),
            ),
            Assertion::new(
                "partial_csit_formula",
                partial_ok,
                format!("K = {k}, m_informed = {informed}: {partial}"),
            ),
        ],
        results: json!({
            "rows": rows,
            "mac_partial": { "K": k, "m_informed": informed, "sdof": partial.to_string() },
        }),
        results_csv: csv.finish(),
        plot_csv: plot.finish(),
    })
}

pub fn region(config: &ExperimentConfig) -> Result<Outcome> {
    let k = config.k() as u32;
    let region = mac_sdof_region(k)?;
    let sum = sdof_formula(SdofQuery::Mac { users: k })?;
    let size = k as usize;
    let zero = Rational64::from_integer(0);

    let corners: Vec<Vec<Rational64>> = region
        .corners
        .iter()
        .map(|c| c.iter().map(|f| f.0).collect())
        .collect();
    let corners_ok = corners
        .iter()
        .all(|c| region.contains(c) && c.iter().sum::<Rational64>() == sum);
    let uniform = vec![sum / Rational64::from_integer(k as i64); size];
    let bump = Rational64::new(1, (k as i64 + 1).pow(2) * 1000);
    let outside: Vec<(String, Vec<Rational64>)> = {
        let mut over = uniform.clone();
        over[0] += bump;
        let mut negative = vec![zero; size];
        negative[0] = -bump;
        let mut beyond = corners[0].clone();
        beyond[0] += bump;
        vec![
            ("uniform_plus".into(), over),
            ("negative".into(), negative),
            ("corner_plus".into(), beyond),
            ("wrong_length".into(), vec![zero; size + 1]),
        ]
    };
    let inside = [
        ("origin".to_string(), vec![zero; size]),
        ("uniform_boundary".to_string(), uniform.clone()),
        ("half_corner".to_string(), corners[0].iter().map(|x| x / 2).collect()),
    ];
    let inside_ok = inside.iter().all(|(_, p)| region.contains(p));
    let outside_ok = outside.iter().all(|(_, p)| !region.contains(p));

    let mut csv = Csv::new(&["point", "coordinates", "expected", "member"]);
    for (name, p, expected) in inside
        .iter()
        .map(|(n, p)| (n, p, true))
        .chain(outside.iter().map(|(n, p)| (n, p, false)))
    {
        let coords = p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        csv.row([name.clone(), coords, expected.to_string(), region.contains(p).to_string()]);
    }
    let mut plot = PlotCsv::new();
    for users in 1..=LOSS_SWEEP_MAX_K {
        let r = mac_sdof_region(users)?;
        plot.point("sum_bound", users as f64, r.sum_bound.to_f64());
    }
    Ok(Outcome {
        assertions: vec![
            Assertion::new(
                "corners",
                corners_ok && corners.len() == size,
                format!("{} corners with coordinate sum {sum}", corners.len()),
            ),
            Assertion::new("interior_points", inside_ok, "origin, uniform boundary point, half corner"),
            Assertion::new("exterior_points", outside_ok, "perturbed beyond the sum bound or below zero"),
            Assertion::new(
                "sum_bound_matches_formula",
                region.sum_bound.0 == sum,
                format!("region sum bound {} vs formula {sum}", region.sum_bound),
            ),
        ],
        results: json!({ "region": region }),
        results_csv: csv.finish(),
        plot_csv: plot.finish(),
    })
}
