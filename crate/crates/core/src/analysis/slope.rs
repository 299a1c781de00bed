//! Degrees-of-freedom slopes: least-squares fits of a measured quantity
//! against `(1/2) ln P`.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::formulas::Fraction;
use crate::error::{param, Result};

/// `{10^2, 10^3, ..., 10^8}`.
pub fn default_power_grid() -> Vec<f64> {
    power_grid(2, 8)
}

/// `{10^lo, ..., 10^hi}`.
pub fn power_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|e| 10f64.powi(e)).collect()
}

/// Least-squares d.o.f. fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the fit, in nats.
    pub residual: f64,
    pub target: Option<Fraction>,
}

/// Fits `values ≈ slope * (1/2) ln P + intercept`. The grid needs at least
/// three points and must span at least three decades.
pub fn fit_dof_slope(grid: &[f64], values: &[f64]) -> Result<SlopeReport> {
    if grid.len() != values.len() {
        return Err(param(format!(
            "{} grid points but {} values",
            grid.len(),
            values.len()
        )));
    }
    if grid.len() < 3 {
        return Err(param("slope fit needs at least 3 grid points"));
    }
    if grid.iter().any(|&p| !(p > 0.0 && p.is_finite())) || values.iter().any(|v| !v.is_finite()) {
        return Err(param("grid must be positive and values finite"));
    }
    let (lo, hi) = grid
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &p| (l.min(p), h.max(p)));
    if (hi / lo).log10() < 3.0 - 1e-9 {
        return Err(param(format!(
            "grid spans {:.2} decades, need at least 3",
            (hi / lo).log10()
        )));
    }
    let x: Vec<f64> = grid.iter().map(|p| 0.5 * p.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = values.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(values).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (x
        .iter()
        .zip(values)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SlopeReport {
        grid: grid.to_vec(),
        values: values.to_vec(),
        slope,
        intercept,
        residual,
        target: None,
    })
}

impl SlopeReport {
    pub fn with_target(mut self, target: Rational64) -> Self {
        self.target = Some(Fraction(target));
        self
    }

    /// `|slope - target|`, when a target is set.
    pub fn deviation(&self) -> Option<f64> {
        self.target.map(|t| (self.slope - t.to_f64()).abs())
    }

    /// CSV with header `P,value_nats,half_log_P`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("P,value_nats,half_log_P\n");
        for (p, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p, v, 0.5 * p.ln()));
        }
        out
    }
}
