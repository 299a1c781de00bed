//! Interference channel: fixed-gain dimension checks and fading precoder
//! verification and leakage.

use num_rational::Rational64;
use rayon::prelude::*;
use sdof_core::analysis::{interference_scheme_sdof, SchemeInformation, SchemeRef};
use sdof_core::channel::{sample_channel, ChannelModel};
use sdof_core::monomial_alignment::{
    m_s_formula, verify_interference_alignment, AlignmentOptions, Monomial,
};
use sdof_core::precoding::{
    build_asymptotic_precoders, precoder_dimension, verify_alignment_equations, BlockId,
    PrecoderOptions, PrecoderSet, PrecodingReport, RankReport,
};
use sdof_core::seed::Domain;
use sdof_core::{Error, Result};
use serde_json::json;

use super::{derived_seed, fit_top, mean};
use crate::config::ExperimentConfig;
use crate::outcome::{dof, real, Assertion, Csv, Outcome, PlotCsv};

pub fn fixed_verify(config: &ExperimentConfig) -> Result<Outcome> {
    let (k, m) = (config.k(), config.m());
    let options = AlignmentOptions {
        beta_rule: config.beta_rule(),
        beta_override: Vec::new(),
    };
    let report = verify_interference_alignment(k, m, &options)?;
    let mutated = verify_interference_alignment(
        k,
        m,
        &AlignmentOptions {
            beta_override: vec![(1, Monomial::one())],
            ..options
        },
    )?;

    let c = &report.cardinalities;
    let exponent = (k * (k - 1) + 2) as u32;
    let want_t = (m as u64).pow(exponent);
    let want_tt = (m as u64 + 1).pow(exponent);
    let cards_ok = c.expected_t == want_t
        && c.expected_t_tilde == want_tt
        && c.t.iter().all(|&x| x == want_t)
        && c.t_tilde.iter().all(|&x| x == want_tt);
    let formula = m_s_formula(k, m)?;
    let m_s_ok = report.m_s_formula == formula && report.m_s.iter().all(|&x| x == formula);

    let mut csv = Csv::new(&["variant", "receiver", "kind", "claim", "status", "detail"]);
    for (variant, r) in [("scheme", &report), ("mutated", &mutated)] {
        for check in &r.checks {
            csv.row([
                variant.to_string(),
                check.receiver.to_string(),
                format!("{:?}", check.kind).to_lowercase(),
                check.claim.clone(),
                format!("{:?}", check.status).to_lowercase(),
                check.detail.replace(',', ";"),
            ]);
        }
    }
    let mut plot = PlotCsv::new();
    for l in 1..=k {
        let passed = |r: &sdof_core::monomial_alignment::AlignmentReport| {
            r.checks
                .iter()
                .filter(|c| c.receiver == l && c.status == sdof_core::monomial_alignment::CheckStatus::Pass)
                .count() as f64
        };
        plot.point("checks_passed", l as f64, passed(&report));
        plot.point("checks_passed_mutated", l as f64, passed(&mutated));
    }
    Ok(Outcome {
        assertions: vec![
            Assertion::new(
                "cardinalities",
                cards_ok,
                format!("|T_i| = {want_t}, |T~_i| = {want_tt}; measured {:?} and {:?}", c.t, c.t_tilde),
            ),
            Assertion::new(
                "m_s_formula",
                m_s_ok,
                format!("M_S = {formula}; measured {:?}", report.m_s),
            ),
            Assertion::new(
                "alignment_checks",
                report.passed(),
                format!(
                    "{}/{} checks pass, {} violations",
                    report.checks_passed(),
                    report.checks.len(),
                    report.violations.len()
                ),
            ),
            Assertion::new(
                "mutation_flagged",
                !mutated.violations.is_empty(),
                format!("beta_1 := 1 gives {} violations", mutated.violations.len()),
            ),
        ],
        results: json!({ "report": report, "mutated": mutated }),
        results_csv: csv.finish(),
        plot_csv: plot.finish(),
    })
}

fn build_set(config: &ExperimentConfig, r: u64) -> Result<PrecoderSet> {
    let (k, n) = (config.k(), config.n());
    let slots = precoder_dimension(k, n)
        .and_then(|d| usize::try_from(d).ok())
        .ok_or(Error::Capacity {
            what: "precoder dimension",
            needed: u128::MAX,
            budget: usize::MAX as u128,
        })?;
    let realization = sample_channel(
        ChannelModel::Interference { users: k },
        config.distribution(),
        slots,
        false,
        derived_seed(config, Domain::Realization, r),
    )?;
    build_asymptotic_precoders(
        k,
        n,
        &realization,
        derived_seed(config, Domain::PrecoderSeed, r),
        &PrecoderOptions::default(),
    )
}

struct Verified {
    equations: PrecodingReport,
    ranks: RankReport,
}

pub fn fading_verify(config: &ExperimentConfig) -> Result<Outcome> {
    let tol = config.rank_tol();
    let runs = (0..config.realizations())
        .into_par_iter()
        .map(|r| -> Result<Verified> {
            let set = build_set(config, r)?;
            Ok(Verified {
                equations: verify_alignment_equations(&set, tol)?,
                ranks: set.rank_report(tol)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mutated = {
        let set = build_set(config, 0)?
            .with_random_block(BlockId::QTilde(1), derived_seed(config, Domain::PrecoderSeed, u64::MAX))?;
        verify_alignment_equations(&set, tol)?
    };

    let equations_ok = runs.iter().all(|v| v.equations.passed());
    let ranks_ok = runs.iter().all(|v| v.ranks.passed);
    let first = &runs[0];
    let mut csv = Csv::new(&[
        "realization",
        "table_passed",
        "table_total",
        "generator_passed",
        "generator_total",
        "verdicts_agree",
        "lambda_min_rank",
        "interference_max_rank",
        "interference_bound",
        "eve_rank",
        "M_n",
    ]);
    let mut plot = PlotCsv::new();
    for (i, v) in runs.iter().enumerate() {
        let e = &v.equations;
        let r = &v.ranks;
        let lambda_min = r.lambda_ranks.iter().copied().min().unwrap_or(0);
        let interference_max = r.interference_ranks.iter().copied().max().unwrap_or(0);
        csv.row([
            i.to_string(),
            e.table_passed.to_string(),
            e.table_total.to_string(),
            e.generator_passed.to_string(),
            e.generator_total.to_string(),
            e.verdicts_agree.to_string(),
            lambda_min.to_string(),
            interference_max.to_string(),
            r.interference_bound.to_string(),
            r.eve_rank.to_string(),
            r.m_n.to_string(),
        ]);
        plot.point("lambda_min_rank", i as f64, lambda_min as f64);
        plot.point("interference_max_rank", i as f64, interference_max as f64);
        plot.point("eve_rank", i as f64, r.eve_rank as f64);
    }
    Ok(Outcome {
        assertions: vec![
            Assertion::new(
                "alignment_equations",
                equations_ok,
                format!(
                    "generator {}/{}, table {}/{} in realization 0; {} of {} realizations pass",
                    first.equations.generator_passed,
                    first.equations.generator_total,
                    first.equations.table_passed,
                    first.equations.table_total,
                    runs.iter().filter(|v| v.equations.passed()).count(),
                    runs.len()
                ),
            ),
            Assertion::new(
                "ranks",
                ranks_ok,
                format!(
                    "rank(Lambda_l) = {:?}, rank(I_l) = {:?} <= {}, rank(I_E) = {} in realization 0, M_n = {}",
                    first.ranks.lambda_ranks,
                    first.ranks.interference_ranks,
                    first.ranks.interference_bound,
                    first.ranks.eve_rank,
                    first.ranks.m_n
                ),
            ),
            Assertion::new(
                "mutation_flagged",
                !mutated.passed(),
                format!(
                    "randomized Q~_1: generator {}/{}, table {}/{}",
                    mutated.generator_passed,
                    mutated.generator_total,
                    mutated.table_passed,
                    mutated.table_total
                ),
            ),
        ],
        results: json!({
            "realizations": runs.iter().map(|v| json!({
                "equations": {
                    "table_passed": v.equations.table_passed,
                    "table_total": v.equations.table_total,
                    "generator_passed": v.equations.generator_passed,
                    "generator_total": v.equations.generator_total,
                    "verdicts_agree": v.equations.verdicts_agree,
                },
                "ranks": v.ranks,
            })).collect::<Vec<_>>(),
            "first_realization_checks": first.equations.checks,
            "mutated": mutated,
        }),
        results_csv: csv.finish(),
        plot_csv: plot.finish(),
    })
}

struct Leakage {
    legit: Vec<Vec<f64>>,
    leak: Vec<f64>,
    leak_slope: f64,
    legit_slopes: Vec<f64>,
    ranks: RankReport,
}

pub fn fading_information(config: &ExperimentConfig) -> Result<Outcome> {
    let (k, n) = (config.k(), config.n());
    let grid = config.grid();
    let sigma2 = config.noise_variance();
    let tol = config.rank_tol();
    let runs = (0..config.realizations())
        .into_par_iter()
        .map(|r| -> Result<Leakage> {
            let set = build_set(config, r)?;
            let info = SchemeInformation::of(SchemeRef::Precoders(&set))?;
            let values = grid
                .iter()
                .map(|&p| info.at(p, sigma2))
                .collect::<Result<Vec<_>>>()?;
            let legit: Vec<Vec<f64>> = (0..k)
                .map(|l| values.iter().map(|v| v.legit_nats[l]).collect())
                .collect();
            let leak: Vec<f64> = values.iter().map(|v| v.leak_nats).collect();
            Ok(Leakage {
                leak_slope: fit_top(config, &grid, &leak)?.slope,
                legit_slopes: legit
                    .iter()
                    .map(|v| fit_top(config, &grid, v).map(|f| f.slope))
                    .collect::<Result<_>>()?,
                legit,
                leak,
                ranks: set.rank_report(tol)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let gamma = ((k - 1) * (k - 1)) as u32;
    let per_receiver = (k - 1) * n.pow(gamma);
    let m_n = runs[0].ranks.m_n;
    let desired: Vec<Vec<usize>> = runs
        .iter()
        .map(|v| {
            v.ranks
                .lambda_ranks
                .iter()
                .zip(&v.ranks.interference_ranks)
                .map(|(a, b)| a.saturating_sub(*b))
                .collect()
        })
        .collect();
    let desired_ok = desired.iter().flatten().all(|&d| d == per_receiver);
    let measured_sum = Rational64::new((k * per_receiver) as i64, m_n as i64);
    let formula = interference_scheme_sdof(k as u32, n as u32)?;
    let sequence = (1..=6u32)
        .map(|n| interference_scheme_sdof(k as u32, n))
        .collect::<Result<Vec<_>>>()?;
    let limit = Rational64::new((k - 1) as i64, 2);
    let monotone = sequence.windows(2).all(|w| w[0] < w[1]) && sequence.iter().all(|&x| x < limit);
    let leak_dev = runs.iter().map(|v| v.leak_slope.abs()).fold(0.0, f64::max);

    let mut header = vec!["realization".to_string(), "P".to_string()];
    header.extend((1..=k).map(|l| format!("legit_nats_{l}")));
    header.push("leak_nats".into());
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    let mut plot = PlotCsv::new();
    for (i, v) in runs.iter().enumerate() {
        for (j, &p) in grid.iter().enumerate() {
            let mut row = vec![i.to_string(), real(p)];
            row.extend(v.legit.iter().map(|x| real(x[j])));
            row.push(real(v.leak[j]));
            csv.row(row);
        }
    }
    for (j, &p) in grid.iter().enumerate() {
        plot.at_power("leak_dof", p, dof(mean(runs.iter().map(|v| v.leak[j])), p));
        for l in 0..k {
            plot.at_power(
                &format!("legit_dof_{}", l + 1),
                p,
                dof(mean(runs.iter().map(|v| v.legit[l][j])), p),
            );
        }
    }
    Ok(Outcome {
        assertions: vec![
            Assertion::new(
                "leak_slope",
                leak_dev <= config.slope_tol(),
                format!("max |slope| = {leak_dev:.4} over {} realizations", runs.len()),
            ),
            Assertion::new(
                "desired_dimensions",
                desired_ok,
                format!("rank(Lambda_l) - rank(I_l) = {desired:?}, expected {per_receiver}"),
            ),
            Assertion::new(
                "sum_sdof_count",
                measured_sum == formula,
                format!("{k} x {per_receiver} / {m_n} = {measured_sum}, formula {formula}"),
            ),
            Assertion::new(
                "sdof_count_monotone",
                monotone,
                format!(
                    "n = 1..6: {}, limit {limit}",
                    sequence.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
                ),
            ),
        ],
        results: json!({
            "K": k,
            "n": n,
            "M_n": m_n,
            "desired_per_receiver": per_receiver,
            "sum_sdof": measured_sum.to_string(),
            "sdof_by_n": sequence.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "realizations": runs.iter().map(|v| json!({
                "leak_slope": v.leak_slope,
                "legit_slopes": v.legit_slopes,
                "ranks": v.ranks,
            })).collect::<Vec<_>>(),
        }),
        results_csv: csv.finish(),
        plot_csv: plot.finish(),
    })
}
