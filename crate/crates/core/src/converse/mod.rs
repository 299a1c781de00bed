//! Computable pieces of the converse: the integer-input integer-output
//! deterministic channel and the bound `H(X | floor(hX)) <= ln(1 + 1/|h|)`
//! for `X` uniform on `{0..floor(sqrt P)}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, GainDistribution};
use crate::error::{param, Error, Result};
use crate::seed::{substream, Domain};

/// Default cap on the number of enumerated input values.
pub const DEFAULT_LEMMA2_BUDGET: u64 = 1_000_000;

/// Integer codeword with entries in `{0..bound-1}`, `bound = floor(sqrt P)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteCodeword {
    pub values: Vec<i64>,
    #[serde(rename = "P")]
    pub p: f64,
    pub bound: i64,
}

fn sqrt_floor(p: f64) -> Result<i64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(param(format!("P must exceed 1, got {p}")));
    }
    let mut b = p.sqrt().floor() as i64;
    // Correct the float square root at perfect squares.
    while ((b + 1) as f64) * ((b + 1) as f64) <= p {
        b += 1;
    }
    while (b as f64) * (b as f64) > p {
        b -= 1;
    }
    Ok(b)
}

/// `floor(x) mod floor(sqrt P)` entry-wise, with the mathematical modulus so
/// that negative inputs also land in `{0..bound-1}`.
pub fn discretize_codeword(x: &[f64], p: f64) -> Result<DiscreteCodeword> {
    let bound = sqrt_floor(p)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(param("codeword has non-finite entries"));
    }
    Ok(DiscreteCodeword {
        values: x.iter().map(|v| (v.floor() as i64).rem_euclid(bound)).collect(),
        p,
        bound,
    })
}

/// Outputs of the deterministic channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicOutputs {
    /// `y[l][t]` for each legitimate receiver `l`.
    pub y: Vec<Vec<i64>>,
    pub z: Vec<i64>,
}

/// `sum_i floor(gains[i][t] * x_i(t))`.
pub fn floor_sum(gains: &[&[f64]], codewords: &[DiscreteCodeword]) -> Result<Vec<i64>> {
    if gains.len() != codewords.len() {
        return Err(Error::Dimension(format!(
            "{} gain sequences for {} codewords",
            gains.len(),
            codewords.len()
        )));
    }
    let len = codewords.first().map_or(0, |c| c.values.len());
    if codewords.iter().any(|c| c.values.len() != len) || gains.iter().any(|g| g.len() < len) {
        return Err(Error::Dimension("codeword or gain lengths disagree".into()));
    }
    Ok((0..len)
        .map(|t| {
            gains
                .iter()
                .zip(codewords)
                .map(|(g, c)| (g[t] * c.values[t] as f64).floor() as i64)
                .sum()
        })
        .collect())
}

/// `Y_l(t) = sum_i floor(h_il(t) X_i(t))` and `Z(t) = sum_i floor(g_i(t) X_i(t))`.
/// A fixed realization applies its gains in every slot.
pub fn deterministic_outputs(
    codewords: &[DiscreteCodeword],
    realization: &ChannelRealization,
) -> Result<DeterministicOutputs> {
    let model = realization.model();
    if codewords.len() != model.transmitters() {
        return Err(Error::Dimension(format!(
            "{} codewords for {} transmitters",
            codewords.len(),
            model.transmitters()
        )));
    }
    let len = codewords.first().map_or(0, |c| c.values.len());
    if !realization.is_fixed() && len > realization.slots() {
        return Err(Error::Dimension(format!(
            "codewords span {len} slots, realization has {}",
            realization.slots()
        )));
    }
    let slot = |t: usize| if realization.is_fixed() { 0 } else { t };
    let series = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
        (1..=model.transmitters())
            .map(|tx| (0..len).map(|t| f(tx, slot(t))).collect())
            .collect()
    };
    let run = |s: &Vec<Vec<f64>>| {
        let refs: Vec<&[f64]> = s.iter().map(|v| v.as_slice()).collect();
        floor_sum(&refs, codewords)
    };
    let y = (1..=model.receivers())
        .map(|rx| run(&series(&|tx, t| realization.h(tx, rx, t))))
        .collect::<Result<Vec<_>>>()?;
    let z = run(&series(&|tx, t| realization.g(tx, t)))?;
    Ok(DeterministicOutputs { y, z })
}

/// Exact `H(X | floor(hX))` for `X` uniform on `{0..floor(sqrt P)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub h: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "H_exact_nats")]
    pub h_exact_nats: f64,
    pub bound_nats: f64,
    pub max_bin: u64,
    /// Entropy above the bound or a bin with `(|S| - 1)|h| >= 1`.
    pub violated: bool,
}

/// Enumerates the bins `S_h(nu) = {x : floor(hx) = nu}`. Since `hx` is
/// monotone in `x`, bins are contiguous runs.
pub fn lemma2_conditional_entropy(h: f64, p: f64, budget: u64) -> Result<Lemma2Report> {
    if h == 0.0 || !h.is_finite() {
        return Err(param(format!("h must be finite and nonzero, got {h}")));
    }
    let top = sqrt_floor(p)?;
    let count = top as u64 + 1;
    if count > budget {
        return Err(Error::Capacity {
            what: "enumerated input values",
            needed: count as u128,
            budget: budget as u128,
        });
    }
    let mut bins: Vec<u64> = Vec::new();
    let mut prev: Option<i64> = None;
    for x in 0..=top {
        let nu = (h * x as f64).floor() as i64;
        if prev == Some(nu) {
            *bins.last_mut().expect("run started") += 1;
        } else {
            bins.push(1);
            prev = Some(nu);
        }
    }
    let n = count as f64;
    let h_exact: f64 = bins
        .iter()
        .filter(|&&s| s > 1)
        .map(|&s| s as f64 / n * (s as f64).ln())
        .sum();
    let bound = (1.0 + 1.0 / h.abs()).ln();
    let max_bin = bins.iter().copied().max().unwrap_or(0);
    let violated = h_exact > bound || (max_bin as f64 - 1.0) * h.abs() >= 1.0;
    Ok(Lemma2Report {
        h,
        p,
        h_exact_nats: h_exact,
        bound_nats: bound,
        max_bin,
        violated,
    })
}

/// Averages of the exact entropy and the bound over sampled gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Expectation {
    #[serde(rename = "P")]
    pub p: f64,
    pub samples: u64,
    /// No samples were requested; the averages are undefined.
    pub empty: bool,
    pub mean_h_exact_nats: Option<f64>,
    pub mean_bound_nats: Option<f64>,
    pub per_sample_violations: u64,
    pub averaged_ok: bool,
    pub reports: Vec<Lemma2Report>,
}

/// Draws `samples` gains from `distribution` and checks the bound for each
/// and on average. Sample `i` uses the substream keyed by `(seed, i)`.
pub fn lemma2_expectation_check(
    distribution: &GainDistribution,
    p: f64,
    samples: u64,
    seed: u64,
    budget: u64,
) -> Result<Lemma2Expectation> {
    distribution.validate()?;
    let reports = (0..samples)
        .into_par_iter()
        .map(|i| {
            let h = distribution.sample(&mut substream(seed, Domain::Lemma2, i, 0));
            lemma2_conditional_entropy(h, p, budget)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = samples as f64;
    let mean = |f: fn(&Lemma2Report) -> f64| {
        (samples > 0).then(|| reports.iter().map(f).sum::<f64>() / n)
    };
    let mean_h = mean(|r| r.h_exact_nats);
    let mean_bound = mean(|r| r.bound_nats);
    Ok(Lemma2Expectation {
        p,
        samples,
        empty: samples == 0,
        mean_h_exact_nats: mean_h,
        mean_bound_nats: mean_bound,
        per_sample_violations: reports.iter().filter(|r| r.violated).count() as u64,
        averaged_ok: match (mean_h, mean_bound) {
            (Some(a), Some(b)) => a <= b,
            _ => false,
        },
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, ChannelModel, RealizationDocument, LegitGainEntry, EveGainEntry};
    use proptest::prelude::*;

    #[test]
    fn discretization_examples() {
        assert_eq!(discretize_codeword(&[0.7, 3.2], 16.0).unwrap().values, vec![0, 3]);
        assert_eq!(discretize_codeword(&[5.9], 16.0).unwrap().values, vec![1]);
        let neg = discretize_codeword(&[-0.3], 16.0).unwrap();
        assert_eq!(neg.values, vec![3]);
        assert_eq!(neg.bound, 4);
        assert!(discretize_codeword(&[1.0], 1.0).is_err());
        assert_eq!(sqrt_floor(1e8).unwrap(), 10_000);
        assert_eq!(sqrt_floor(99.0).unwrap(), 9);
    }

    fn fixed(gains: &[f64]) -> ChannelRealization {
        let users = gains.len();
        let doc = RealizationDocument {
            model: ChannelModel::Mac { users },
            slots: 1,
            fixed: true,
            seed: 0,
            noise_variance: 1.0,
            distribution: GainDistribution::new(0.1, 10.0, true).unwrap(),
            gains: gains
                .iter()
                .enumerate()
                .map(|(i, &value)| LegitGainEntry { tx: i + 1, rx: 1, t: 0, value })
                .collect(),
            eve_gains: gains
                .iter()
                .enumerate()
                .map(|(i, &value)| EveGainEntry { tx: i + 1, t: 0, value })
                .collect(),
        };
        ChannelRealization::from_document(&doc).unwrap()
    }

    fn cw(values: Vec<i64>) -> DiscreteCodeword {
        DiscreteCodeword { values, p: 1e4, bound: 100 }
    }

    #[test]
    fn deterministic_examples() {
        let one = fixed(&[1.5]);
        assert_eq!(deterministic_outputs(&[cw(vec![2])], &one).unwrap().y, vec![vec![3]]);
        let two = fixed(&[1.5, 0.7]);
        let out = deterministic_outputs(&[cw(vec![2]), cw(vec![3])], &two).unwrap();
        assert_eq!(out.y, vec![vec![5]]);
        assert_eq!(out.z, vec![5]);
        let zero = deterministic_outputs(&[cw(vec![0, 0]), cw(vec![0, 0])], &two).unwrap();
        assert_eq!(zero.y, vec![vec![0, 0]]);
        assert!(deterministic_outputs(&[cw(vec![1])], &two).is_err());
    }

    #[test]
    fn interference_outputs_per_receiver() {
        let model = ChannelModel::Interference { users: 3 };
        let r = sample_channel(model, GainDistribution::default(), 4, false, 2).unwrap();
        let x: Vec<DiscreteCodeword> = (0..3).map(|i| cw(vec![i, 2 * i, 3, 7])).collect();
        let out = deterministic_outputs(&x, &r).unwrap();
        assert_eq!(out.y.len(), 3);
        let t = 3;
        let want: i64 = (1..=3).map(|tx| (r.h(tx, 2, t) * x[tx - 1].values[t] as f64).floor() as i64).sum();
        assert_eq!(out.y[1][t], want);
    }

    #[test]
    fn lemma2_examples() {
        let r = lemma2_conditional_entropy(1.0, 1e4, DEFAULT_LEMMA2_BUDGET).unwrap();
        assert_eq!(r.h_exact_nats, 0.0);
        let r = lemma2_conditional_entropy(0.5, 16.0, DEFAULT_LEMMA2_BUDGET).unwrap();
        assert_eq!(r.h_exact_nats, 0.8 * 2f64.ln());
        assert!((r.bound_nats - 3f64.ln()).abs() < 1e-15);
        assert_eq!(r.max_bin, 2);
        assert!(!r.violated);
        let r = lemma2_conditional_entropy(2.0, 100.0, DEFAULT_LEMMA2_BUDGET).unwrap();
        assert_eq!(r.h_exact_nats, 0.0);
        assert!((r.bound_nats - 1.5f64.ln()).abs() < 1e-15);
        assert!(lemma2_conditional_entropy(0.0, 16.0, 10).is_err());
        assert!(matches!(
            lemma2_conditional_entropy(0.5, 1e8, 1000),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn entropy_nonincreasing_in_gain() {
        let v: Vec<f64> = (1..=20)
            .map(|i| lemma2_conditional_entropy(i as f64 / 10.0, 1e4, DEFAULT_LEMMA2_BUDGET).unwrap().h_exact_nats)
            .collect();
        assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{v:?}");
    }

    #[test]
    fn expectation_check() {
        let d = GainDistribution::default();
        let e = lemma2_expectation_check(&d, 1e4, 100, 3, DEFAULT_LEMMA2_BUDGET).unwrap();
        assert_eq!(e.per_sample_violations, 0);
        assert!(e.averaged_ok);
        assert!(e.mean_h_exact_nats.unwrap() <= 3f64.ln());
        let empty = lemma2_expectation_check(&d, 1e4, 0, 3, DEFAULT_LEMMA2_BUDGET).unwrap();
        assert!(empty.empty && empty.mean_h_exact_nats.is_none() && !empty.averaged_ok);
    }

    proptest! {
        #[test]
        fn discretized_values_in_range(x in proptest::collection::vec(-1e6f64..1e6, 1..20), p in 2.0f64..1e8) {
            let c = discretize_codeword(&x, p).unwrap();
            prop_assert!(c.values.iter().all(|&v| (0..c.bound).contains(&v)));
        }

        #[test]
        fn bins_respect_strict_bound(h in prop_oneof![-3.0f64..-0.05, 0.05f64..3.0], p in 2.0f64..1e6) {
            let r = lemma2_conditional_entropy(h, p, DEFAULT_LEMMA2_BUDGET).unwrap();
            prop_assert!(!r.violated);
            prop_assert!((r.max_bin as f64) < 1.0 + 1.0 / h.abs());
        }

        #[test]
        fn outputs_commute_with_time_permutation(seed in 0u64..1000, rot in 0usize..6) {
            let model = ChannelModel::Mac { users: 2 };
            let r = sample_channel(model, GainDistribution::default(), 1, true, seed).unwrap();
            let x = vec![cw(vec![1, 5, 9, 13, 40, 99]), cw(vec![3, 0, 8, 2, 77, 4])];
            let out = deterministic_outputs(&x, &r).unwrap();
            let rotated: Vec<DiscreteCodeword> = x.iter().map(|c| {
                let mut v = c.values.clone();
                v.rotate_left(rot);
                cw(v)
            }).collect();
            let out_r = deterministic_outputs(&rotated, &r).unwrap();
            let mut y = out.y[0].clone();
            y.rotate_left(rot);
            prop_assert_eq!(y, out_r.y[0].clone());
        }
    }
}
