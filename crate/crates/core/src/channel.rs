//! Channel realizations and additive noise.
//!
//! Transmitter and receiver indices are 1-based, matching the gain names used
//! throughout the crate (`h_21` is transmitter 2 to receiver 1). Time slots are
//! 0-based.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::seed::{substream, Domain};

/// Bounded, zero-avoiding distribution for channel gains and random constants.
///
/// Magnitudes are uniform on `[magnitude_low, magnitude_high]`; with
/// `sign_symmetric` the sign is an independent fair coin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainDistribution {
    pub magnitude_low: f64,
    pub magnitude_high: f64,
    pub sign_symmetric: bool,
}

impl Default for GainDistribution {
    fn default() -> Self {
        Self {
            magnitude_low: 0.5,
            magnitude_high: 2.0,
            sign_symmetric: true,
        }
    }
}

impl GainDistribution {
    pub fn new(magnitude_low: f64, magnitude_high: f64, sign_symmetric: bool) -> Result<Self> {
        let d = Self {
            magnitude_low,
            magnitude_high,
            sign_symmetric,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.magnitude_low.is_finite() && self.magnitude_high.is_finite()) {
            return Err(param("gain distribution bounds must be finite"));
        }
        if self.magnitude_low <= 0.0 {
            return Err(param(format!(
                "magnitude_low must be > 0, got {}",
                self.magnitude_low
            )));
        }
        if self.magnitude_high <= self.magnitude_low {
            return Err(param(format!(
                "magnitude_high ({}) must exceed magnitude_low ({})",
                self.magnitude_high, self.magnitude_low
            )));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mag = rng.random_range(self.magnitude_low..=self.magnitude_high);
        if self.sign_symmetric && rng.random_bool(0.5) {
            -mag
        } else {
            mag
        }
    }

    /// Upper bound on `E[log(1 + 1/|h|)]`, in nats.
    pub fn integrability_bound(&self) -> f64 {
        (1.0 + 1.0 / self.magnitude_low).ln()
    }

    pub fn contains(&self, x: f64) -> bool {
        let a = x.abs();
        a >= self.magnitude_low && a <= self.magnitude_high && (self.sign_symmetric || x > 0.0)
    }
}

/// Network topology of a realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelModel {
    /// Wiretap channel with `helpers` cooperative jammers; transmitter 1 is legitimate.
    Helper { helpers: usize },
    /// K-user multiple access wiretap channel.
    Mac { users: usize },
    /// K-user MAC where transmitters `1..=informed` know the eavesdropper gains.
    MacPartial { users: usize, informed: usize },
    /// K-user interference channel with an external eavesdropper.
    Interference { users: usize },
}

impl ChannelModel {
    pub fn transmitters(&self) -> usize {
        match *self {
            ChannelModel::Helper { helpers } => helpers + 1,
            ChannelModel::Mac { users }
            | ChannelModel::MacPartial { users, .. }
            | ChannelModel::Interference { users } => users,
        }
    }

    pub fn receivers(&self) -> usize {
        match *self {
            ChannelModel::Interference { users } => users,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelModel::Helper { .. } => Ok(()),
            ChannelModel::Mac { users } | ChannelModel::Interference { users } if users == 0 => {
                Err(param("model needs at least one user"))
            }
            ChannelModel::MacPartial { users, informed } if informed == 0 || informed > users => {
                Err(param(format!(
                    "informed transmitters must be in 1..={users}, got {informed}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// All channel gains of one experiment plus the noise variance.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    model: ChannelModel,
    slots: usize,
    fixed: bool,
    seed: u64,
    distribution: GainDistribution,
    noise_variance: f64,
    /// `[(tx-1) * receivers + (rx-1)] * slots + t`
    legit: Vec<f64>,
    /// `(tx-1) * slots + t`
    eve: Vec<f64>,
}

/// Draws a realization. Fading mode draws every (link, slot) independently;
/// fixed mode draws each link once and repeats it over all slots.
pub fn sample_channel(
    model: ChannelModel,
    distribution: GainDistribution,
    slots: usize,
    fixed: bool,
    seed: u64,
) -> Result<ChannelRealization> {
    distribution.validate()?;
    model.validate()?;
    if slots == 0 {
        return Err(param("slots must be >= 1"));
    }
    let tx = model.transmitters();
    let rx = model.receivers();
    let draw = |domain: Domain, link: usize, t: usize| {
        let t_key = if fixed { 0 } else { t as u64 };
        distribution.sample(&mut substream(seed, domain, link as u64, t_key))
    };
    let legit: Vec<f64> = (0..tx * rx * slots)
        .into_par_iter()
        .map(|i| draw(Domain::LegitGain, i / slots, i % slots))
        .collect();
    let eve: Vec<f64> = (0..tx * slots)
        .into_par_iter()
        .map(|i| draw(Domain::EveGain, i / slots, i % slots))
        .collect();
    Ok(ChannelRealization {
        model,
        slots,
        fixed,
        seed,
        distribution,
        noise_variance: 1.0,
        legit,
        eve,
    })
}

impl ChannelRealization {
    pub fn model(&self) -> ChannelModel {
        self.model
    }
    pub fn slots(&self) -> usize {
        self.slots
    }
    pub fn is_fixed(&self) -> bool {
        self.fixed
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn distribution(&self) -> &GainDistribution {
        &self.distribution
    }
    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn with_noise_variance(mut self, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(param(format!("noise variance must be > 0, got {variance}")));
        }
        self.noise_variance = variance;
        Ok(self)
    }

    fn legit_index(&self, tx: usize, rx: usize, t: usize) -> usize {
        let (ntx, nrx) = (self.model.transmitters(), self.model.receivers());
        assert!(
            (1..=ntx).contains(&tx) && (1..=nrx).contains(&rx) && t < self.slots,
            "gain index out of range: tx={tx} rx={rx} t={t}"
        );
        ((tx - 1) * nrx + (rx - 1)) * self.slots + t
    }

    /// Gain from transmitter `tx` to legitimate receiver `rx` in slot `t`.
    pub fn h(&self, tx: usize, rx: usize, t: usize) -> f64 {
        self.legit[self.legit_index(tx, rx, t)]
    }

    /// Gain from transmitter `tx` to the single legitimate receiver.
    pub fn h1(&self, tx: usize, t: usize) -> f64 {
        self.h(tx, 1, t)
    }

    /// Gain from transmitter `tx` to the eavesdropper in slot `t`.
    pub fn g(&self, tx: usize, t: usize) -> f64 {
        assert!(
            (1..=self.model.transmitters()).contains(&tx) && t < self.slots,
            "eavesdropper gain index out of range: tx={tx} t={t}"
        );
        self.eve[(tx - 1) * self.slots + t]
    }

    /// Per-slot gains of link `tx -> rx`.
    pub fn h_series(&self, tx: usize, rx: usize) -> &[f64] {
        let start = self.legit_index(tx, rx, 0);
        &self.legit[start..start + self.slots]
    }

    pub fn g_series(&self, tx: usize) -> &[f64] {
        let start = (tx - 1) * self.slots;
        &self.eve[start..start + self.slots]
    }

    /// Smallest gain magnitude over every stored link and slot.
    pub fn min_abs_gain(&self) -> f64 {
        self.legit
            .iter()
            .chain(&self.eve)
            .fold(f64::INFINITY, |m, x| m.min(x.abs()))
    }

    pub fn legit_gain_count(&self) -> usize {
        self.legit.len()
    }

    pub fn eve_gain_count(&self) -> usize {
        self.eve.len()
    }

    pub fn require_model(&self, expected: ChannelModel) -> Result<()> {
        if self.model != expected {
            return Err(Error::Mode(format!(
                "expected {expected:?}, realization is {:?}",
                self.model
            )));
        }
        Ok(())
    }

    pub fn require_fixed(&self, fixed: bool) -> Result<()> {
        if self.fixed != fixed {
            let want = if fixed { "fixed" } else { "fading" };
            return Err(Error::Mode(format!("scheme requires {want} channel gains")));
        }
        Ok(())
    }

    pub fn to_document(&self) -> RealizationDocument {
        let (ntx, nrx) = (self.model.transmitters(), self.model.receivers());
        let mut gains = Vec::with_capacity(self.legit.len());
        for tx in 1..=ntx {
            for rx in 1..=nrx {
                for t in 0..self.slots {
                    gains.push(LegitGainEntry {
                        tx,
                        rx,
                        t,
                        value: self.h(tx, rx, t),
                    });
                }
            }
        }
        let mut eve_gains = Vec::with_capacity(self.eve.len());
        for tx in 1..=ntx {
            for t in 0..self.slots {
                eve_gains.push(EveGainEntry {
                    tx,
                    t,
                    value: self.g(tx, t),
                });
            }
        }
        RealizationDocument {
            model: self.model,
            slots: self.slots,
            fixed: self.fixed,
            seed: self.seed,
            noise_variance: self.noise_variance,
            distribution: self.distribution,
            gains,
            eve_gains,
        }
    }

    /// Rebuilds a realization from its document, checking every invariant.
    pub fn from_document(doc: &RealizationDocument) -> Result<Self> {
        doc.distribution.validate()?;
        doc.model.validate()?;
        let (ntx, nrx) = (doc.model.transmitters(), doc.model.receivers());
        if doc.slots == 0 {
            return Err(param("slots must be >= 1"));
        }
        let mut legit = vec![f64::NAN; ntx * nrx * doc.slots];
        for e in &doc.gains {
            if !(1..=ntx).contains(&e.tx) || !(1..=nrx).contains(&e.rx) || e.t >= doc.slots {
                return Err(param(format!("gain entry out of range: {e:?}")));
            }
            legit[((e.tx - 1) * nrx + (e.rx - 1)) * doc.slots + e.t] = e.value;
        }
        let mut eve = vec![f64::NAN; ntx * doc.slots];
        for e in &doc.eve_gains {
            if !(1..=ntx).contains(&e.tx) || e.t >= doc.slots {
                return Err(param(format!("eavesdropper gain entry out of range: {e:?}")));
            }
            eve[(e.tx - 1) * doc.slots + e.t] = e.value;
        }
        if let Some(bad) = legit
            .iter()
            .chain(&eve)
            .find(|x| !doc.distribution.contains(**x))
        {
            return Err(param(format!(
                "gain {bad} missing or outside the distribution support"
            )));
        }
        Ok(Self {
            model: doc.model,
            slots: doc.slots,
            fixed: doc.fixed,
            seed: doc.seed,
            distribution: doc.distribution,
            noise_variance: doc.noise_variance,
            legit,
            eve,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegitGainEntry {
    pub tx: usize,
    pub rx: usize,
    pub t: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EveGainEntry {
    pub tx: usize,
    pub t: usize,
    pub value: f64,
}

/// Serializable form of a [`ChannelRealization`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationDocument {
    pub model: ChannelModel,
    pub slots: usize,
    pub fixed: bool,
    pub seed: u64,
    pub noise_variance: f64,
    pub distribution: GainDistribution,
    pub gains: Vec<LegitGainEntry>,
    pub eve_gains: Vec<EveGainEntry>,
}

/// I.i.d. zero-mean Gaussian samples with the given variance.
pub fn awgn_vector(length: usize, variance: f64, seed: u64) -> Result<Vec<f64>> {
    if length == 0 {
        return Err(param("noise length must be >= 1"));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(param(format!("noise variance must be > 0, got {variance}")));
    }
    let normal = Normal::new(0.0, variance.sqrt()).map_err(|e| param(e.to_string()))?;
    let mut rng = substream(seed, Domain::Noise, 0, 0);
    Ok((0..length).map(|_| normal.sample(&mut rng)).collect())
}
