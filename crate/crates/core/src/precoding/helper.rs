//! Wiretap channel with `M` helpers under fading, over `M+1` slots.
//!
//! In slot `t` the legitimate transmitter sends
//! `U_1/h_1(t) + sum_k alpha_k(t) V_k` and helper `j` sends `U_j/h_j(t)`.
//! All jamming symbols reach the legitimate receiver with coefficient 1 and
//! occupy one dimension; the `M` messages fill the remaining `M` dimensions.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Observation;
use crate::channel::{ChannelModel, ChannelRealization};
use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, solve, DEFAULT_RANK_TOL};
use crate::seed::{substream, Domain};

const ALPHA_RETRIES: u64 = 100;

/// Slot-stacked matrices of the fading helper scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelperFadingScheme {
    #[serde(rename = "M")]
    pub m: usize,
    /// `alphas[k-2][t]` is `alpha_k(t)` for `k = 2..=M+1`.
    pub alphas: Vec<Vec<f64>>,
    /// Redraws needed before `T` had full rank.
    pub attempts: u64,
    pub a_v: DMatrix<f64>,
    pub a_u: DMatrix<f64>,
    pub b_v: DMatrix<f64>,
    pub b_u: DMatrix<f64>,
    /// `T_ij = alpha_i(j) h_1(j)` with `alpha_1 = 1/h_1`.
    pub t_check: DMatrix<f64>,
}

/// Builds the scheme on the first `M+1` slots of a fading helper realization.
/// The `alpha_k(t)` come from the realization's gain distribution under
/// `alpha_seed` and are redrawn until `T` has full numeric rank.
pub fn build_helper_fading(
    helpers: usize,
    realization: &ChannelRealization,
    alpha_seed: u64,
) -> Result<HelperFadingScheme> {
    realization.require_model(ChannelModel::Helper { helpers })?;
    realization.require_fixed(false)?;
    let slots = helpers + 1;
    if realization.slots() < slots {
        return Err(Error::Mode(format!(
            "fading helper scheme needs {slots} slots, realization has {}",
            realization.slots()
        )));
    }
    let dist = realization.distribution();
    let h1 = |t: usize| realization.h1(1, t);
    for attempt in 0..ALPHA_RETRIES {
        let alphas: Vec<Vec<f64>> = (2..=slots)
            .map(|k| {
                (0..slots)
                    .map(|t| {
                        let key = (attempt << 32) | t as u64;
                        dist.sample(&mut substream(alpha_seed, Domain::Alpha, k as u64, key))
                    })
                    .collect()
            })
            .collect();
        let t_check = DMatrix::from_fn(slots, slots, |i, j| {
            if i == 0 {
                1.0
            } else {
                alphas[i - 1][j] * h1(j)
            }
        });
        if numeric_rank(&t_check, DEFAULT_RANK_TOL) < slots {
            continue;
        }
        let a_v = DMatrix::from_fn(slots, helpers, |i, j| h1(i) * alphas[j][i]);
        let a_u = DMatrix::from_element(slots, slots, 1.0);
        let b_v = DMatrix::from_fn(slots, helpers, |i, j| realization.g(1, i) * alphas[j][i]);
        let b_u = DMatrix::from_fn(slots, slots, |i, j| {
            realization.g(j + 1, i) / realization.h1(j + 1, i)
        });
        return Ok(HelperFadingScheme {
            m: helpers,
            alphas,
            attempts: attempt + 1,
            a_v,
            a_u,
            b_v,
            b_u,
            t_check,
        });
    }
    Err(Error::Numeric(format!(
        "T stayed rank deficient after {ALPHA_RETRIES} alpha draws"
    )))
}

impl HelperFadingScheme {
    pub fn slots(&self) -> usize {
        self.m + 1
    }

    /// Legitimate receiver: messages against the aligned jamming.
    pub fn legit_observation(&self) -> Observation {
        Observation {
            wanted: self.a_v.clone(),
            other: self.a_u.clone(),
        }
    }

    /// Eavesdropper: messages against the unaligned jamming.
    pub fn eve_observation(&self) -> Observation {
        Observation {
            wanted: self.b_v.clone(),
            other: self.b_u.clone(),
        }
    }

    /// Noiseless legitimate observations for message and jamming symbols.
    pub fn receive(&self, v: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.m || u.len() != self.m + 1 {
            return Err(Error::Dimension(format!(
                "expected {} messages and {} jamming symbols, got {} and {}",
                self.m,
                self.m + 1,
                v.len(),
                u.len()
            )));
        }
        let jam: f64 = u.iter().sum();
        Ok((0..self.slots())
            .map(|t| jam + (0..self.m).map(|j| self.a_v[(t, j)] * v[j]).sum::<f64>())
            .collect())
    }
}

/// Inverts `[A_V 1]` to recover `(V_2..V_{M+1}, sum U)` and returns the
/// message estimates.
pub fn zero_force_decode(observations: &[f64], scheme: &HelperFadingScheme) -> Result<Vec<f64>> {
    let slots = scheme.slots();
    if observations.len() != slots {
        return Err(Error::Dimension(format!(
            "expected {slots} observations, got {}",
            observations.len()
        )));
    }
    let system = DMatrix::from_fn(slots, slots, |i, j| {
        if j < scheme.m {
            scheme.a_v[(i, j)]
        } else {
            1.0
        }
    });
    let mut x = solve(&system, observations)?;
    x.truncate(scheme.m);
    Ok(x)
}
