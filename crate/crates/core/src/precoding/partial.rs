//! Multiple access wiretap channel under fading where only transmitters
//! `1..=m` know the eavesdropper gains.
//!
//! Informed transmitter `i` sends `V_ij`, `j != i`, scaled by
//! `g_j(t)/(h_j(t) g_i(t))`; every transmitter sends `U_i/h_i(t)`. Over
//! `m(K-1)+1` slots the receiver sees the `m(K-1)` messages plus one aggregate
//! jamming dimension, while at the eavesdropper `V_ij` shares its coefficient
//! with `U_j` in every slot.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Observation, StreamRole};
use crate::channel::{ChannelModel, ChannelRealization};
use crate::error::{param, Error, Result};
use crate::linalg::solve;

/// Per-slot coefficient tables of the partial-CSIT fading scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialCsitFading {
    pub users: usize,
    pub informed: usize,
    pub labels: Vec<String>,
    pub roles: Vec<StreamRole>,
    pub owners: Vec<usize>,
    /// For message `V_ij`, the index of `U_j` among the streams.
    pub eve_partner: Vec<Option<usize>>,
    /// Coefficient each owner applies, slot x stream.
    pub tx: DMatrix<f64>,
    /// Coefficient at the legitimate receiver, slot x stream.
    pub legit: DMatrix<f64>,
    /// Coefficient at the eavesdropper, slot x stream.
    pub eve: DMatrix<f64>,
}

/// Builds the coefficient tables on the first `m(K-1)+1` slots.
pub fn build_partial_csit_fading(
    users: usize,
    informed: usize,
    realization: &ChannelRealization,
) -> Result<PartialCsitFading> {
    if users < 2 {
        return Err(param(format!("partial-CSIT MAC needs >= 2 users, got {users}")));
    }
    if informed == 0 || informed > users {
        return Err(param(format!(
            "informed transmitters must be in 1..={users}, got {informed}"
        )));
    }
    realization.require_model(ChannelModel::MacPartial { users, informed })?;
    realization.require_fixed(false)?;
    let slots = informed * (users - 1) + 1;
    if realization.slots() < slots {
        return Err(Error::Mode(format!(
            "partial-CSIT fading scheme needs {slots} slots, realization has {}",
            realization.slots()
        )));
    }
    let mut labels = Vec::new();
    let mut roles = Vec::new();
    let mut owners = Vec::new();
    let mut partners = Vec::new();
    let message_count = informed * (users - 1);
    for i in 1..=informed {
        for j in (1..=users).filter(|&j| j != i) {
            labels.push(format!("V_{i}{j}"));
            roles.push(StreamRole::Message);
            owners.push(i);
            partners.push(Some(message_count + j - 1));
        }
    }
    for i in 1..=users {
        labels.push(format!("U_{i}"));
        roles.push(StreamRole::Jamming);
        owners.push(i);
        partners.push(None);
    }
    let h = |tx: usize, t: usize| realization.h1(tx, t);
    let g = |tx: usize, t: usize| realization.g(tx, t);
    // Message `V_ij` sits at column `(i-1)(K-1) + rank of j among j != i`.
    let target = |col: usize| -> usize {
        let i = owners[col];
        let within = col - (i - 1) * (users - 1);
        if within + 1 < i {
            within + 1
        } else {
            within + 2
        }
    };
    let tx = DMatrix::from_fn(slots, labels.len(), |t, c| match roles[c] {
        StreamRole::Message => {
            let (i, j) = (owners[c], target(c));
            g(j, t) / (h(j, t) * g(i, t))
        }
        StreamRole::Jamming => 1.0 / h(owners[c], t),
    });
    let legit = DMatrix::from_fn(slots, labels.len(), |t, c| h(owners[c], t) * tx[(t, c)]);
    let eve = DMatrix::from_fn(slots, labels.len(), |t, c| g(owners[c], t) * tx[(t, c)]);
    Ok(PartialCsitFading {
        users,
        informed,
        labels,
        roles,
        owners,
        eve_partner: partners,
        tx,
        legit,
        eve,
    })
}

impl PartialCsitFading {
    pub fn slots(&self) -> usize {
        self.tx.nrows()
    }

    pub fn message_count(&self) -> usize {
        self.informed * (self.users - 1)
    }

    fn split(&self, m: &DMatrix<f64>) -> Observation {
        let k = self.message_count();
        Observation {
            wanted: m.columns(0, k).into_owned(),
            other: m.columns(k, m.ncols() - k).into_owned(),
        }
    }

    pub fn legit_observation(&self) -> Observation {
        self.split(&self.legit)
    }

    pub fn eve_observation(&self) -> Observation {
        self.split(&self.eve)
    }

    /// Noiseless legitimate observations for all stream symbols in order.
    pub fn receive(&self, symbols: &[f64]) -> Result<Vec<f64>> {
        if symbols.len() != self.legit.ncols() {
            return Err(Error::Dimension(format!(
                "expected {} symbols, got {}",
                self.legit.ncols(),
                symbols.len()
            )));
        }
        let x = nalgebra::DVector::from_column_slice(symbols);
        Ok((&self.legit * x).iter().copied().collect())
    }

    /// Solves for the messages and the aggregate jamming symbol.
    pub fn zero_force_decode(&self, observations: &[f64]) -> Result<Vec<f64>> {
        let k = self.message_count();
        let system = DMatrix::from_fn(self.slots(), k + 1, |t, c| {
            if c < k {
                self.legit[(t, c)]
            } else {
                1.0
            }
        });
        let mut x = solve(&system, observations)?;
        x.truncate(k);
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, GainDistribution};
    use crate::linalg::{numeric_rank, DEFAULT_RANK_TOL};

    fn scheme(users: usize, informed: usize, seed: u64) -> PartialCsitFading {
        let model = ChannelModel::MacPartial { users, informed };
        let slots = informed * (users - 1) + 1;
        let r = sample_channel(model, GainDistribution::default(), slots, false, seed).unwrap();
        build_partial_csit_fading(users, informed, &r).unwrap()
    }

    #[test]
    fn two_informed_of_three() {
        let s = scheme(3, 2, 1);
        assert_eq!(s.slots(), 5);
        assert_eq!(s.message_count(), 4);
        assert_eq!(s.labels[..4], ["V_12", "V_13", "V_21", "V_23"]);
        let legit = s.legit_observation();
        assert!(legit.other.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        assert_eq!(numeric_rank(&legit.stacked(), DEFAULT_RANK_TOL), 5);
    }

    #[test]
    fn messages_share_eve_column_with_partner_jamming() {
        let s = scheme(3, 3, 2);
        for c in 0..s.message_count() {
            let p = s.eve_partner[c].unwrap();
            assert_eq!(s.labels[p], format!("U_{}", &s.labels[c][3..]));
            for t in 0..s.slots() {
                let (a, b) = (s.eve[(t, c)], s.eve[(t, p)]);
                assert!((a - b).abs() <= 1e-14 * b.abs());
            }
        }
        let eve = s.eve_observation();
        let jam_rank = numeric_rank(&eve.other, DEFAULT_RANK_TOL);
        assert_eq!(numeric_rank(&eve.stacked(), DEFAULT_RANK_TOL), jam_rank);
    }

    #[test]
    fn one_informed_matches_helper_structure() {
        let s = scheme(3, 1, 3);
        assert_eq!(s.slots(), 3);
        assert_eq!(s.message_count(), 2);
        assert!(s.roles[..2].iter().all(|&r| r == StreamRole::Message));
        assert!(s.owners[..2].iter().all(|&o| o == 1));
        assert_eq!(s.legit_observation().other.shape(), (3, 3));
        assert_eq!(numeric_rank(&s.legit_observation().stacked(), DEFAULT_RANK_TOL), 3);
    }

    #[test]
    fn noiseless_decode_is_exact() {
        for informed in 1..=3 {
            let s = scheme(3, informed, 10 + informed as u64);
            let symbols: Vec<f64> = (0..s.labels.len()).map(|i| i as f64 * 1.7 - 3.0).collect();
            let est = s.zero_force_decode(&s.receive(&symbols).unwrap()).unwrap();
            for (a, b) in symbols.iter().zip(&est) {
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let model = ChannelModel::MacPartial { users: 3, informed: 2 };
        let r = sample_channel(model, GainDistribution::default(), 4, false, 1).unwrap();
        assert!(matches!(build_partial_csit_fading(3, 2, &r), Err(Error::Mode(_))));
        assert!(build_partial_csit_fading(3, 0, &r).is_err());
        assert!(build_partial_csit_fading(3, 4, &r).is_err());
    }
}
