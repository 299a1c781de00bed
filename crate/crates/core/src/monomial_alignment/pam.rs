//! PAM-based real interference alignment for fixed gains: the wiretap channel
//! with helpers and the multiple access channel with partial eavesdropper
//! knowledge.
//!
//! Every stream carries one symbol from `a * {-Q..Q}`. Jamming streams are
//! pre-scaled so they all arrive at the legitimate receiver with coefficient
//! exactly 1 and collapse into a single aggregate dimension.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::monomial::{Gen, Monomial};
use crate::channel::{ChannelModel, ChannelRealization};
use crate::error::{param, Error, Result};
use crate::seed::{substream, Domain};

/// Default cap on the number of receive constellation points.
pub const DEFAULT_DECODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamKind {
    Message,
    Jamming,
}

/// One PAM stream with its symbolic coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stream {
    pub label: String,
    pub kind: StreamKind,
    /// Transmitter that sends the stream (1-based).
    pub owner: usize,
    pub tx_coeff: Monomial,
    pub rx_coeff: Monomial,
    pub eve_coeff: Monomial,
}

/// Stream structure and the numeric values of every generator it uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PamLayout {
    pub model: ChannelModel,
    pub transmitters: usize,
    pub streams: Vec<Stream>,
    pub values: BTreeMap<Gen, f64>,
}

/// Constellation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PamParams {
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "Q")]
    pub q: u64,
    pub a: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// A layout with its constellation parameters fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PamScheme {
    pub layout: PamLayout,
    pub params: PamParams,
}

/// Gain values of slot `t` keyed by generator.
pub fn gain_values(r: &ChannelRealization, t: usize) -> BTreeMap<Gen, f64> {
    let mut v = BTreeMap::new();
    let model = r.model();
    for tx in 1..=model.transmitters() {
        v.insert(Gen::Eve(tx), r.g(tx, t));
        if model.receivers() == 1 {
            v.insert(Gen::Legit(tx), r.h1(tx, t));
        } else {
            for rx in 1..=model.receivers() {
                v.insert(Gen::Cross(tx, rx), r.h(tx, rx, t));
            }
        }
    }
    v
}

fn stream(label: String, kind: StreamKind, owner: usize, tx_coeff: Monomial) -> Stream {
    let rx_coeff = tx_coeff.mul(&Gen::Legit(owner).into());
    let eve_coeff = tx_coeff.mul(&Gen::Eve(owner).into());
    Stream {
        label,
        kind,
        owner,
        tx_coeff,
        rx_coeff,
        eve_coeff,
    }
}

fn hinv(i: usize) -> Monomial {
    Monomial::gen(Gen::Legit(i)).inv()
}

/// Wiretap channel with `helpers` helpers. The legitimate transmitter sends
/// `V_2..V_{M+1}` scaled by random `alpha_k` plus `U_1/h_1`; helper `j` sends
/// `U_j/h_j`. The `alpha_k` are drawn from the realization's distribution
/// under `alpha_seed`.
pub fn build_helper_scheme(
    helpers: usize,
    realization: &ChannelRealization,
    alpha_seed: u64,
) -> Result<PamLayout> {
    let model = ChannelModel::Helper { helpers };
    realization.require_model(model)?;
    realization.require_fixed(true)?;
    let mut values = gain_values(realization, 0);
    let mut streams = Vec::new();
    for k in 2..=helpers + 1 {
        let alpha = realization
            .distribution()
            .sample(&mut substream(alpha_seed, Domain::Alpha, k as u64, 0));
        values.insert(Gen::Alpha(k), alpha);
        streams.push(stream(
            format!("V_{k}"),
            StreamKind::Message,
            1,
            Gen::Alpha(k).into(),
        ));
    }
    for j in 1..=helpers + 1 {
        streams.push(stream(format!("U_{j}"), StreamKind::Jamming, j, hinv(j)));
    }
    Ok(PamLayout {
        model,
        transmitters: helpers + 1,
        streams,
        values,
    })
}

/// MAC where transmitters `1..=informed` know the eavesdropper gains. Informed
/// transmitter `i` sends `V_ij`, `j != i`, scaled by `g_j/(h_j g_i)` so that it
/// lands on top of `U_j` at the eavesdropper. Everyone sends `U_i/h_i`.
pub fn build_partial_csit_fixed(
    users: usize,
    informed: usize,
    realization: &ChannelRealization,
) -> Result<PamLayout> {
    if informed == 0 || informed > users {
        return Err(param(format!(
            "informed transmitters must be in 1..={users}, got {informed}"
        )));
    }
    let model = ChannelModel::MacPartial { users, informed };
    realization.require_model(model)?;
    realization.require_fixed(true)?;
    let mut streams = Vec::new();
    for i in 1..=informed {
        for j in (1..=users).filter(|&j| j != i) {
            let c = Monomial::from_terms([
                (Gen::Eve(j), 1),
                (Gen::Legit(j), -1),
                (Gen::Eve(i), -1),
            ]);
            streams.push(stream(format!("V_{i}{j}"), StreamKind::Message, i, c));
        }
    }
    for i in 1..=users {
        streams.push(stream(format!("U_{i}"), StreamKind::Jamming, i, hinv(i)));
    }
    Ok(PamLayout {
        model,
        transmitters: users,
        streams,
        values: gain_values(realization, 0),
    })
}

impl PamLayout {
    pub fn message_count(&self) -> usize {
        self.streams
            .iter()
            .filter(|s| s.kind == StreamKind::Message)
            .count()
    }

    pub fn jamming_count(&self) -> usize {
        self.streams.len() - self.message_count()
    }

    pub fn value(&self, m: &Monomial) -> Result<f64> {
        m.eval(&self.values)
    }

    /// Legitimate-receiver gain of transmitter `tx`.
    pub fn rx_gain(&self, tx: usize) -> Result<f64> {
        self.value(&Gen::Legit(tx).into())
    }

    /// Distinct receive coefficients, in order of first appearance.
    pub fn distinct_rx_coeffs(&self) -> Vec<Monomial> {
        distinct(self.streams.iter().map(|s| &s.rx_coeff))
    }

    pub fn distinct_eve_coeffs(&self) -> Vec<Monomial> {
        distinct(self.streams.iter().map(|s| &s.eve_coeff))
    }

    /// `sum_i |tx coefficient|` for each transmitter.
    pub fn amplitude_sums(&self) -> Result<Vec<f64>> {
        let mut sums = vec![0.0; self.transmitters];
        for s in &self.streams {
            sums[s.owner - 1] += self.value(&s.tx_coeff)?.abs();
        }
        Ok(sums)
    }
}

fn distinct<'a>(it: impl Iterator<Item = &'a Monomial>) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = Vec::new();
    for m in it {
        if !out.contains(m) {
            out.push(m.clone());
        }
    }
    out
}

/// `floor(P^{(1-δ)/(2(L+1+δ))})` clamped to at least 1, for `L` message streams.
pub fn pam_levels(p: f64, messages: usize, delta: f64) -> u64 {
    let e = (1.0 - delta) / (2.0 * (messages as f64 + 1.0 + delta));
    (p.powf(e).floor() as u64).max(1)
}

/// Chooses `Q`, `a` and `γ`. `γ` is the largest scale for which every
/// transmitter meets the amplitude limit `√P` at the constellation edge.
pub fn select_pam_params(p: f64, delta: f64, layout: &PamLayout) -> Result<PamParams> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(param(format!("power must exceed 1, got {p}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(param(format!("delta must be in (0, 1), got {delta}")));
    }
    let q = pam_levels(p, layout.message_count(), delta);
    let gamma = layout
        .amplitude_sums()?
        .into_iter()
        .filter(|&s| s > 0.0)
        .map(|s| 1.0 / s)
        .fold(f64::INFINITY, f64::min);
    if !gamma.is_finite() {
        return Err(param("layout has no streams"));
    }
    Ok(PamParams {
        p,
        q,
        a: gamma * p.sqrt() / q as f64,
        gamma,
        delta,
    })
}

impl PamScheme {
    pub fn new(layout: PamLayout, params: PamParams) -> Result<Self> {
        if params.q == 0 || params.a.is_nan() || params.a <= 0.0 {
            return Err(param("Q must be >= 1 and a > 0"));
        }
        if params.a * params.q as f64 > params.gamma * params.p.sqrt() * (1.0 + 1e-12) {
            return Err(param("a*Q exceeds gamma*sqrt(P)"));
        }
        Ok(Self { layout, params })
    }

    /// Builds with parameters chosen by [`select_pam_params`].
    pub fn with_power(layout: PamLayout, p: f64, delta: f64) -> Result<Self> {
        let params = select_pam_params(p, delta, &layout)?;
        Self::new(layout, params)
    }

    /// Constellation points `a * {-Q..Q}`.
    pub fn constellation(&self) -> Vec<f64> {
        let q = self.params.q as i64;
        (-q..=q).map(|s| self.params.a * s as f64).collect()
    }
}

/// Unspecified-constant minimum distance scale `k_δ a / ((M+1)Q)^{M+δ}`.
/// The constant is an existence result, so the value is only a scale.
pub fn khintchine_groshev_bound(a: f64, q: u64, m: usize, delta: f64, k_delta: f64) -> f64 {
    k_delta * a / ((m as f64 + 1.0) * q as f64).powf(m as f64 + delta)
}

/// Channel inputs for one symbol per stream, in stream order.
pub fn encode_pam(scheme: &PamScheme, symbols: &[i64]) -> Result<Vec<f64>> {
    let layout = &scheme.layout;
    if symbols.len() != layout.streams.len() {
        return Err(Error::Encoding(format!(
            "{} symbols for {} streams",
            symbols.len(),
            layout.streams.len()
        )));
    }
    let q = scheme.params.q as i64;
    let mut x = vec![0.0; layout.transmitters];
    for (s, &sym) in layout.streams.iter().zip(symbols) {
        if sym.abs() > q {
            return Err(Error::Encoding(format!(
                "symbol {sym} of {} outside -{q}..={q}",
                s.label
            )));
        }
        x[s.owner - 1] += layout.value(&s.tx_coeff)? * scheme.params.a * sym as f64;
    }
    Ok(x)
}

/// Noiseless legitimate-receiver output `sum_i h_i X_i`.
pub fn receive_noiseless(scheme: &PamScheme, inputs: &[f64]) -> Result<f64> {
    inputs
        .iter()
        .enumerate()
        .map(|(i, x)| Ok(scheme.layout.rx_gain(i + 1)? * x))
        .sum()
}

/// Streams sharing one receive coefficient; decoded as their symbol sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeGroup {
    pub label: String,
    pub streams: Vec<usize>,
    pub coeff: f64,
    /// Aggregate symbol runs over `-range..=range`.
    pub range: i64,
}

/// Exhaustive nearest-point decoder over the receive constellation.
///
/// Points are sorted once by `(value, tuple index)`; the tuple index is mixed
/// radix with the first group most significant, so among equidistant points
/// the lexicographically smallest symbol tuple wins.
#[derive(Debug, Clone)]
pub struct NearestPointDecoder {
    groups: Vec<DecodeGroup>,
    radices: Vec<u64>,
    points: Vec<(f64, u64)>,
}

impl NearestPointDecoder {
    pub fn new(scheme: &PamScheme, budget: u64) -> Result<Self> {
        let layout = &scheme.layout;
        let q = scheme.params.q as i64;
        let mut groups: Vec<DecodeGroup> = Vec::new();
        let mut keys: Vec<&Monomial> = Vec::new();
        for (i, s) in layout.streams.iter().enumerate() {
            match keys.iter().position(|k| **k == s.rx_coeff) {
                Some(g) => {
                    groups[g].streams.push(i);
                    groups[g].range += q;
                    groups[g].label = format!("{}+{}", groups[g].label, s.label);
                }
                None => {
                    keys.push(&s.rx_coeff);
                    groups.push(DecodeGroup {
                        label: s.label.clone(),
                        streams: vec![i],
                        coeff: layout.value(&s.rx_coeff)? * scheme.params.a,
                        range: q,
                    });
                }
            }
        }
        for g in &groups {
            let has_message = g
                .streams
                .iter()
                .any(|&i| layout.streams[i].kind == StreamKind::Message);
            if has_message && g.streams.len() > 1 {
                return Err(Error::Unsupported(format!(
                    "message stream shares receive dimension {}",
                    g.label
                )));
            }
        }
        let radices: Vec<u64> = groups.iter().map(|g| 2 * g.range as u64 + 1).collect();
        let total = radices
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
            .unwrap_or(u128::MAX);
        if total > budget as u128 {
            return Err(Error::Capacity {
                what: "receive constellation points",
                needed: total,
                budget: budget as u128,
            });
        }
        let mut points = Vec::with_capacity(total as usize);
        let mut digits = vec![0u64; groups.len()];
        for index in 0..total as u64 {
            let v: f64 = groups
                .iter()
                .zip(&digits)
                .map(|(g, &d)| g.coeff * (d as i64 - g.range) as f64)
                .sum();
            points.push((v, index));
            for i in (0..digits.len()).rev() {
                digits[i] += 1;
                if digits[i] < radices[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(Self {
            groups,
            radices,
            points,
        })
    }

    pub fn groups(&self) -> &[DecodeGroup] {
        &self.groups
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    fn tuple(&self, mut index: u64) -> Vec<i64> {
        let mut out = vec![0; self.groups.len()];
        for i in (0..out.len()).rev() {
            out[i] = (index % self.radices[i]) as i64 - self.groups[i].range;
            index /= self.radices[i];
        }
        out
    }

    /// Nearest aggregate symbol tuple, one entry per group.
    pub fn decode(&self, y: f64) -> Vec<i64> {
        let pts = &self.points;
        let p = pts.partition_point(|&(v, _)| v < y);
        let right = pts.get(p).map(|&(v, i)| (v - y, i));
        let left = p.checked_sub(1).map(|mut q| {
            let v = pts[q].0;
            while q > 0 && pts[q - 1].0 == v {
                q -= 1;
            }
            (y - v, pts[q].1)
        });
        let index = match (left, right) {
            (Some((dl, il)), Some((dr, ir))) => {
                if dl < dr {
                    il
                } else if dr < dl {
                    ir
                } else {
                    il.min(ir)
                }
            }
            (Some((_, i)), None) | (None, Some((_, i))) => i,
            (None, None) => unreachable!("decoder has at least one point"),
        };
        self.tuple(index)
    }

    /// Aggregate tuple produced by the given per-stream symbols.
    pub fn aggregate(&self, symbols: &[i64]) -> Vec<i64> {
        self.groups
            .iter()
            .map(|g| g.streams.iter().map(|&i| symbols[i]).sum())
            .collect()
    }
}

/// Decoded message symbols by label plus the aggregate jamming estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodedSymbols {
    pub messages: Vec<(String, i64)>,
    pub aggregates: Vec<(String, i64)>,
}

/// One-shot nearest-point decoding of a legitimate-receiver observation.
pub fn decode_nearest_point(y: f64, scheme: &PamScheme, budget: u64) -> Result<DecodedSymbols> {
    let dec = NearestPointDecoder::new(scheme, budget)?;
    let tuple = dec.decode(y);
    let mut out = DecodedSymbols {
        messages: Vec::new(),
        aggregates: Vec::new(),
    };
    for (g, v) in dec.groups().iter().zip(tuple) {
        let first = &scheme.layout.streams[g.streams[0]];
        if first.kind == StreamKind::Message {
            out.messages.push((first.label.clone(), v));
        } else {
            out.aggregates.push((g.label.clone(), v));
        }
    }
    Ok(out)
}
