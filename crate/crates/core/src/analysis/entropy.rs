//! Closed-form Gaussian entropies and the mutual information of linear
//! schemes with Gaussian inputs.
//!
//! For `X ~ N(0, P I)` and `N ~ N(0, s2 I)`,
//! `h(AX + N) = (rows ln(2 pi e) + ln det(s2 I + P A Aᵀ)) / 2` nats.
//! Matrices are factored once; evaluating at another power is then a sum over
//! singular values.

use std::f64::consts::{E, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::precoding::{HelperFadingScheme, Observation, PartialCsitFading, PrecoderSet};

fn check_power(p: f64, sigma2: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite() && sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(param(format!("need P > 0 and sigma2 > 0, got P={p}, sigma2={sigma2}")));
    }
    Ok(())
}

/// Singular values of a matrix, ready for entropy evaluation at any power.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProfile {
    rows: usize,
    singular_values: Vec<f64>,
}

impl EntropyProfile {
    pub fn of(a: &DMatrix<f64>) -> Result<Self> {
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("matrix has non-finite entries".into()));
        }
        let singular_values = if a.ncols() == 0 || a.nrows() == 0 {
            Vec::new()
        } else {
            a.clone().singular_values().iter().copied().collect()
        };
        Ok(Self {
            rows: a.nrows(),
            singular_values,
        })
    }

    /// Differential entropy in nats.
    pub fn entropy(&self, p: f64, sigma2: f64) -> f64 {
        let zero_modes = self.rows - self.singular_values.len();
        let logdet: f64 = self
            .singular_values
            .iter()
            .map(|s| (sigma2 + p * s * s).ln())
            .sum::<f64>()
            + zero_modes as f64 * sigma2.ln();
        0.5 * (self.rows as f64 * (2.0 * PI * E).ln() + logdet)
    }
}

/// `h(AX + N)` in nats for `X ~ N(0, P I)`, `N ~ N(0, sigma2 I)`.
pub fn gaussian_entropy(a: &DMatrix<f64>, p: f64, sigma2: f64) -> Result<f64> {
    check_power(p, sigma2)?;
    Ok(EntropyProfile::of(a)?.entropy(p, sigma2))
}

/// `I(wanted; Y) = h([wanted other] x + N) - h(other u + N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MutualInformationProfile {
    joint: EntropyProfile,
    conditional: EntropyProfile,
}

impl MutualInformationProfile {
    pub fn of(obs: &Observation) -> Result<Self> {
        Ok(Self {
            joint: EntropyProfile::of(&obs.stacked())?,
            conditional: EntropyProfile::of(&obs.other)?,
        })
    }

    /// Mutual information in nats. The difference is nonnegative in exact
    /// arithmetic; rounding below zero is clipped.
    pub fn at(&self, p: f64, sigma2: f64) -> f64 {
        (self.joint.entropy(p, sigma2) - self.conditional.entropy(p, sigma2)).max(0.0)
    }
}

/// A slot-stacked scheme whose information rates can be evaluated.
#[derive(Debug, Clone, Copy)]
pub enum SchemeRef<'a> {
    Helper(&'a HelperFadingScheme),
    Precoders(&'a PrecoderSet),
    PartialCsit(&'a PartialCsitFading),
}

/// Factored legitimate and eavesdropper observations of a scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeInformation {
    /// One entry per legitimate receiver.
    pub legit: Vec<MutualInformationProfile>,
    pub leak: MutualInformationProfile,
}

/// Mutual information values at one power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutualInformation {
    #[serde(rename = "P")]
    pub p: f64,
    pub legit_nats: Vec<f64>,
    pub leak_nats: f64,
}

impl SchemeInformation {
    pub fn of(scheme: SchemeRef<'_>) -> Result<Self> {
        let (legit, eve) = match scheme {
            SchemeRef::Helper(s) => (vec![s.legit_observation()], s.eve_observation()),
            SchemeRef::PartialCsit(s) => (vec![s.legit_observation()], s.eve_observation()),
            SchemeRef::Precoders(s) => (
                (1..=s.k)
                    .map(|l| s.legit_observation(l))
                    .collect::<Result<Vec<_>>>()?,
                s.eve_observation()?,
            ),
        };
        Ok(Self {
            legit: legit
                .iter()
                .map(MutualInformationProfile::of)
                .collect::<Result<_>>()?,
            leak: MutualInformationProfile::of(&eve)?,
        })
    }

    pub fn at(&self, p: f64, sigma2: f64) -> Result<MutualInformation> {
        check_power(p, sigma2)?;
        Ok(MutualInformation {
            p,
            legit_nats: self.legit.iter().map(|m| m.at(p, sigma2)).collect(),
            leak_nats: self.leak.at(p, sigma2),
        })
    }
}

/// `I(V;Y)` per receiver and `I(V;Z)` at power `p`.
pub fn scheme_mutual_information(
    scheme: SchemeRef<'_>,
    p: f64,
    sigma2: f64,
) -> Result<MutualInformation> {
    SchemeInformation::of(scheme)?.at(p, sigma2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, ChannelModel, GainDistribution};
    use crate::precoding::build_helper_fading;
    use crate::seed::{substream, Domain};
    use rand_distr::{Distribution, StandardNormal};

    const HALF_LOG_2PIE: f64 = 1.4189385332046727;

    #[test]
    fn pure_noise_and_unit_channel() {
        let zero = DMatrix::zeros(1, 1);
        assert!((gaussian_entropy(&zero, 1.0, 1.0).unwrap() - HALF_LOG_2PIE).abs() < 1e-14);
        let id = DMatrix::identity(1, 1);
        let want = 0.5 * (4.0 * PI * E).ln();
        assert!((gaussian_entropy(&id, 1.0, 1.0).unwrap() - want).abs() < 1e-14);
        let empty = DMatrix::zeros(2, 0);
        assert!((gaussian_entropy(&empty, 5.0, 1.0).unwrap() - 2.0 * HALF_LOG_2PIE).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        let id = DMatrix::<f64>::identity(1, 1);
        assert!(gaussian_entropy(&id, 0.0, 1.0).is_err());
        assert!(gaussian_entropy(&id, 1.0, -1.0).is_err());
        assert!(gaussian_entropy(&DMatrix::from_element(1, 1, f64::NAN), 1.0, 1.0).is_err());
    }

    #[test]
    fn matches_determinant_formula() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.3, -0.7, 0.2, 1.5, 0.4]);
        let cov: DMatrix<f64> = DMatrix::identity(2, 2) * 0.5 + (&a * a.transpose()) * 7.0;
        let want = 0.5 * (2.0 * (2.0 * PI * E).ln() + cov.determinant().ln());
        assert!((gaussian_entropy(&a, 7.0, 0.5).unwrap() - want).abs() < 1e-12);
    }

    fn monte_carlo_entropy(a: &DMatrix<f64>, p: f64, s2: f64, n: usize) -> (f64, f64) {
        // Average of -ln f(y) under the exact Gaussian density of y.
        let cov: DMatrix<f64> = DMatrix::identity(a.nrows(), a.nrows()) * s2 + (a * a.transpose()) * p;
        let inv = cov.clone().try_inverse().unwrap();
        let chol = cov.clone().cholesky().unwrap().l();
        let logdet = cov.determinant().ln();
        let m = a.nrows() as f64;
        let mut rng = substream(3, Domain::Symbols, 9, 9);
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let z = nalgebra::DVector::from_fn(a.nrows(), |_, _| StandardNormal.sample(&mut rng));
            let y = &chol * z;
            let v = 0.5 * (m * (2.0 * PI).ln() + logdet + (y.transpose() * &inv * &y)[(0, 0)]);
            sum += v;
            sq += v * v;
        }
        let mean = sum / n as f64;
        (mean, ((sq / n as f64 - mean * mean) / n as f64).sqrt())
    }

    #[test]
    fn agrees_with_monte_carlo_estimate() {
        for a in [
            DMatrix::from_element(1, 1, 0.8),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.3, 2.0]),
        ] {
            let exact = gaussian_entropy(&a, 3.0, 1.0).unwrap();
            let (est, se) = monte_carlo_entropy(&a, 3.0, 1.0, 200_000);
            assert!((exact - est).abs() < 5.0 * se, "{exact} vs {est} +- {se}");
        }
    }

    #[test]
    fn mutual_information_nonnegative_and_monotone_in_jamming() {
        let model = ChannelModel::Helper { helpers: 2 };
        let r = sample_channel(model, GainDistribution::default(), 3, false, 5).unwrap();
        let s = build_helper_fading(2, &r, 1).unwrap();
        let info = SchemeInformation::of(SchemeRef::Helper(&s)).unwrap();
        for e in 1..=8 {
            let mi = info.at(10f64.powi(e), 1.0).unwrap();
            assert!(mi.legit_nats[0] >= 0.0 && mi.leak_nats >= 0.0);
        }
        // Moving jamming power into the noise can only lower I(V;Y).
        let obs = s.legit_observation();
        let p = 1e4;
        let base = MutualInformationProfile::of(&obs).unwrap().at(p, 1.0);
        let louder = Observation::new(obs.wanted.clone(), obs.other.clone() * 2.0).unwrap();
        let with_more_jam = MutualInformationProfile::of(&louder).unwrap().at(p, 1.0);
        assert!(with_more_jam <= base + 1e-12);
    }

    #[test]
    fn helper_two_at_one_million() {
        let model = ChannelModel::Helper { helpers: 2 };
        let r = sample_channel(model, GainDistribution::default(), 3, false, 7).unwrap();
        let s = build_helper_fading(2, &r, 2).unwrap();
        let mi = scheme_mutual_information(SchemeRef::Helper(&s), 1e6, 1.0).unwrap();
        let target = 2.0 * 0.5 * 1e6f64.ln();
        assert!((mi.legit_nats[0] - target).abs() < 0.25 * target);
        assert!(mi.leak_nats < 0.25 * target);
    }
}
