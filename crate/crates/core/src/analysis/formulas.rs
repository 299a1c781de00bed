//! Exact secure degrees of freedom, with and without eavesdropper CSIT, and
//! the MAC s.d.o.f. region.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{param, Error, Result};

/// An exact rational, serialized as `"n/d"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(pub Rational64);

impl Fraction {
    pub fn new(n: i64, d: i64) -> Self {
        Self(Rational64::new(n, d))
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Fraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || param(format!("not a fraction: {s:?}"));
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Self::new(n, d))
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl From<Rational64> for Fraction {
    fn from(r: Rational64) -> Self {
        Self(r)
    }
}

/// Network whose s.d.o.f. is asked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SdofQuery {
    Helper {
        #[serde(rename = "M")]
        helpers: u32,
    },
    Mac {
        #[serde(rename = "K")]
        users: u32,
    },
    MacPartial {
        #[serde(rename = "K")]
        users: u32,
        m_informed: u32,
    },
    Interference {
        #[serde(rename = "K")]
        users: u32,
    },
}

impl SdofQuery {
    fn validate(&self) -> Result<()> {
        match *self {
            SdofQuery::Helper { .. } => Ok(()),
            SdofQuery::Mac { users } | SdofQuery::Interference { users } if users == 0 => {
                Err(param("K must be >= 1"))
            }
            SdofQuery::MacPartial { users, m_informed } if users == 0 || m_informed > users => {
                Err(param(format!("need K >= 1 and m_informed <= K, got K={users}, m={m_informed}")))
            }
            _ => Ok(()),
        }
    }
}

fn r(n: u32, d: u32) -> Rational64 {
    Rational64::new(n as i64, d as i64)
}

/// Sum s.d.o.f. without eavesdropper CSIT.
pub fn sdof_formula(q: SdofQuery) -> Result<Rational64> {
    q.validate()?;
    Ok(match q {
        SdofQuery::Helper { helpers: m } => r(m, m + 1),
        SdofQuery::Mac { users: k } => r(k - 1, k),
        SdofQuery::MacPartial { users: k, m_informed: m } => r(m * (k - 1), m * (k - 1) + 1),
        SdofQuery::Interference { users: k } => r(k - 1, 2),
    })
}

/// Sum s.d.o.f. when every transmitter knows the eavesdropper gains.
pub fn sdof_formula_full_csit(q: SdofQuery) -> Result<Rational64> {
    q.validate()?;
    Ok(match q {
        SdofQuery::Helper { helpers: m } => r(m, m + 1),
        SdofQuery::Mac { users: k } | SdofQuery::MacPartial { users: k, .. } => {
            r(k * (k - 1), k * (k - 1) + 1)
        }
        SdofQuery::Interference { users: k } => r(k * (k - 1), 2 * k - 1),
    })
}

/// With- and without-CSIT values and the loss between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsitComparison {
    pub query: SdofQuery,
    pub without_csit: Fraction,
    pub with_csit: Fraction,
    pub loss: Fraction,
    /// Interference channel only: the loss stays at or below 1/4.
    pub loss_within_quarter: Option<bool>,
}

pub fn sdof_formula_with_csit(q: SdofQuery) -> Result<CsitComparison> {
    let without = sdof_formula(q)?;
    let with = sdof_formula_full_csit(q)?;
    let loss = with - without;
    Ok(CsitComparison {
        query: q,
        without_csit: without.into(),
        with_csit: with.into(),
        loss: loss.into(),
        loss_within_quarter: matches!(q, SdofQuery::Interference { .. })
            .then(|| loss <= Rational64::new(1, 4)),
    })
}

/// Sum s.d.o.f. count `K(K-1) n^Gamma / M_n` of the finite-`n` fading
/// interference scheme.
pub fn interference_scheme_sdof(users: u32, n: u32) -> Result<Rational64> {
    if users < 3 || n == 0 {
        return Err(param(format!("need K >= 3 and n >= 1, got K={users}, n={n}")));
    }
    let gamma = (users - 1) * (users - 1);
    let overflow = || Error::Capacity {
        what: "rational numerator",
        needed: u128::MAX,
        budget: i64::MAX as u128,
    };
    let small = (n as i64).checked_pow(gamma).ok_or_else(overflow)?;
    let large = (n as i64 + 1).checked_pow(gamma).ok_or_else(overflow)?;
    let k = users as i64;
    let num = (k * (k - 1)).checked_mul(small).ok_or_else(overflow)?;
    let den = ((k - 1).checked_mul(small))
        .and_then(|a| (k + 1).checked_mul(large).and_then(|b| a.checked_add(b)))
        .ok_or_else(overflow)?;
    Ok(Rational64::new(num, den))
}

/// Linear constraint `normal · d <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<i64>,
    pub bound: Fraction,
}

/// `{d : d_i >= 0, sum d_i <= (K-1)/K}` with its nonzero corner points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacRegion {
    #[serde(rename = "K")]
    pub users: u32,
    pub sum_bound: Fraction,
    pub corners: Vec<Vec<Fraction>>,
    pub half_spaces: Vec<HalfSpace>,
}

pub fn mac_sdof_region(users: u32) -> Result<MacRegion> {
    if users == 0 {
        return Err(param("K must be >= 1"));
    }
    let k = users as usize;
    let bound = r(users - 1, users);
    let zero = Fraction::new(0, 1);
    let corners = (0..k)
        .map(|i| {
            let mut c = vec![zero; k];
            c[i] = bound.into();
            c
        })
        .collect();
    let mut half_spaces: Vec<HalfSpace> = (0..k)
        .map(|i| {
            let mut normal = vec![0; k];
            normal[i] = -1;
            HalfSpace { normal, bound: zero }
        })
        .collect();
    half_spaces.push(HalfSpace {
        normal: vec![1; k],
        bound: bound.into(),
    });
    Ok(MacRegion {
        users,
        sum_bound: bound.into(),
        corners,
        half_spaces,
    })
}

impl MacRegion {
    /// Exact membership; points of the wrong length are not members.
    pub fn contains(&self, d: &[Rational64]) -> bool {
        d.len() == self.users as usize
            && self.half_spaces.iter().all(|h| {
                let lhs: Rational64 = h
                    .normal
                    .iter()
                    .zip(d)
                    .map(|(&a, &x)| x * a)
                    .sum();
                lhs <= h.bound.0
            })
    }
}
