//! Monte Carlo decoding error of the fixed-gain PAM schemes and the reliable
//! rate it implies.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::monomial_alignment::{encode_pam, receive_noiseless, NearestPointDecoder, PamScheme, StreamKind};
use crate::seed::{substream, Domain};

/// Trial settings for [`monte_carlo_error_rate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateOptions {
    pub trials: u64,
    pub seed: u64,
    /// Receiver noise variance; zero gives a noiseless channel.
    pub noise_variance: f64,
    pub decode_budget: u64,
}

/// Outcome of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateEstimate {
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "Q")]
    pub q: u64,
    pub a: f64,
    pub messages: usize,
    pub trials: u64,
    pub errors: u64,
    /// `None` when no trial ran.
    pub rate: Option<f64>,
    /// Lower bound on the reliable rate in nats per channel use.
    pub reliable_rate_nats: Option<f64>,
}

fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
    }
}

/// `(1 - Pe) L ln(2Q+1) - h_b(Pe)`, floored at zero: the message entropy
/// minus a Fano bound on what the errors can hide.
pub fn reliable_rate(pe: f64, messages: usize, q: u64) -> f64 {
    let full = messages as f64 * (2.0 * q as f64 + 1.0).ln();
    ((1.0 - pe) * full - binary_entropy(pe)).max(0.0)
}

/// Fraction of trials in which any message symbol is decoded wrongly. Every
/// stream carries a uniform symbol from `{-Q..Q}`; trial `i` draws its
/// symbols and noise from substreams keyed by `(seed, i)`.
pub fn monte_carlo_error_rate(scheme: &PamScheme, options: &ErrorRateOptions) -> Result<ErrorRateEstimate> {
    if !(options.noise_variance >= 0.0 && options.noise_variance.is_finite()) {
        return Err(param(format!(
            "noise variance must be >= 0, got {}",
            options.noise_variance
        )));
    }
    let decoder = NearestPointDecoder::new(scheme, options.decode_budget)?;
    let layout = &scheme.layout;
    let message_groups: Vec<usize> = decoder
        .groups()
        .iter()
        .enumerate()
        .filter(|(_, g)| layout.streams[g.streams[0]].kind == StreamKind::Message)
        .map(|(i, _)| i)
        .collect();
    let q = scheme.params.q as i64;
    let sd = options.noise_variance.sqrt();
    let errors = (0..options.trials)
        .into_par_iter()
        .map(|trial| -> Result<u64> {
            let mut rng = substream(options.seed, Domain::Symbols, trial, 0);
            let symbols: Vec<i64> = (0..layout.streams.len())
                .map(|_| rng.random_range(-q..=q))
                .collect();
            let mut y = receive_noiseless(scheme, &encode_pam(scheme, &symbols)?)?;
            if sd > 0.0 {
                let z: f64 = StandardNormal.sample(&mut substream(options.seed, Domain::Noise, trial, 0));
                y += sd * z;
            }
            let got = decoder.decode(y);
            let want = decoder.aggregate(&symbols);
            Ok(message_groups.iter().any(|&g| got[g] != want[g]) as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let rate = (options.trials > 0).then(|| errors as f64 / options.trials as f64);
    let messages = layout.message_count();
    Ok(ErrorRateEstimate {
        p: scheme.params.p,
        q: scheme.params.q,
        a: scheme.params.a,
        messages,
        trials: options.trials,
        errors,
        rate,
        reliable_rate_nats: rate.map(|pe| reliable_rate(pe, messages, scheme.params.q)),
    })
}
