//! Monomials over named real generators with exact integer exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{param, Error, Result};

/// A named real quantity that may appear in a monomial.
///
/// All indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    /// Gain from transmitter `i` to the only legitimate receiver.
    Legit(usize),
    /// Gain from transmitter `tx` to receiver `rx`.
    Cross(usize, usize),
    /// Gain from transmitter `i` to the eavesdropper.
    Eve(usize),
    /// Random dimension-tagging constant.
    Const(usize),
    /// Random message scaling factor.
    Alpha(usize),
    /// Random seed vector of a precoder family.
    Seed(usize),
}

fn idx(i: usize) -> String {
    if i < 10 {
        i.to_string()
    } else {
        format!("{{{i}}}")
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gen::Legit(i) => write!(f, "h_{}", idx(i)),
            Gen::Cross(j, k) if j < 10 && k < 10 => write!(f, "h_{j}{k}"),
            Gen::Cross(j, k) => write!(f, "h_{{{j},{k}}}"),
            Gen::Eve(i) => write!(f, "g_{}", idx(i)),
            Gen::Const(i) => write!(f, "c_{}", idx(i)),
            Gen::Alpha(i) => write!(f, "alpha_{}", idx(i)),
            Gen::Seed(i) => write!(f, "w_{}", idx(i)),
        }
    }
}

impl FromStr for Gen {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || param(format!("unrecognized generator name {s:?}"));
        let (head, tail) = s.split_once('_').ok_or_else(bad)?;
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let (braced, body) = match tail.strip_prefix('{') {
            Some(rest) => (true, rest.strip_suffix('}').ok_or_else(bad)?),
            None => (false, tail),
        };
        let single = || -> Result<usize> {
            if !braced && body.len() != 1 {
                return Err(bad());
            }
            num(body)
        };
        let g = match head {
            "h" if braced && body.contains(',') => {
                let (j, k) = body.split_once(',').ok_or_else(bad)?;
                Gen::Cross(num(j)?, num(k)?)
            }
            "h" if !braced && body.len() == 2 => {
                Gen::Cross(num(&body[..1])?, num(&body[1..])?)
            }
            "h" => Gen::Legit(single()?),
            "g" => Gen::Eve(single()?),
            "c" => Gen::Const(single()?),
            "alpha" => Gen::Alpha(single()?),
            "w" => Gen::Seed(single()?),
            _ => return Err(bad()),
        };
        Ok(g)
    }
}

impl Serialize for Gen {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Gen {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Source of numeric generator values.
pub trait Valuation {
    fn value(&self, g: Gen) -> Option<f64>;
}

impl Valuation for BTreeMap<Gen, f64> {
    fn value(&self, g: Gen) -> Option<f64> {
        self.get(&g).copied()
    }
}

/// Product of generator powers in canonical form: sorted by generator, no
/// zero exponents. Equality is exact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    terms: Vec<(Gen, i32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn gen(g: Gen) -> Self {
        Self { terms: vec![(g, 1)] }
    }

    /// Builds from arbitrary `(gen, exponent)` pairs, merging duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Gen, i32)>>(terms: I) -> Self {
        let mut map = BTreeMap::new();
        for (g, e) in terms {
            *map.entry(g).or_insert(0) += e;
        }
        Self {
            terms: map.into_iter().filter(|&(_, e)| e != 0).collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Gen, i32)] {
        &self.terms
    }

    pub fn exponent(&self, g: Gen) -> i32 {
        self.terms
            .binary_search_by(|(x, _)| x.cmp(&g))
            .map(|i| self.terms[i].1)
            .unwrap_or(0)
    }

    pub fn contains(&self, g: Gen) -> bool {
        self.exponent(g) != 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (self.terms[i], other.terms[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if a.1 + b.1 != 0 {
                        out.push((a.0, a.1 + b.1));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Monomial { terms: out }
    }

    pub fn pow(&self, e: i32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial {
            terms: self.terms.iter().map(|&(g, x)| (g, x * e)).collect(),
        }
    }

    pub fn inv(&self) -> Monomial {
        self.pow(-1)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.inv())
    }

    /// Numeric value; fails if a generator has no value.
    pub fn eval<V: Valuation + ?Sized>(&self, v: &V) -> Result<f64> {
        let mut acc = 1.0;
        for &(g, e) in &self.terms {
            let x = v
                .value(g)
                .ok_or_else(|| param(format!("no value for generator {g}")))?;
            acc *= x.powi(e);
        }
        Ok(acc)
    }
}

impl std::ops::Mul for &Monomial {
    type Output = Monomial;
    fn mul(self, rhs: &Monomial) -> Monomial {
        Monomial::mul(self, rhs)
    }
}

impl From<Gen> for Monomial {
    fn from(g: Gen) -> Self {
        Monomial::gen(g)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("1");
        }
        for (n, (g, e)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Monomial::one());
        }
        let mut terms = Vec::new();
        for tok in s.split_whitespace() {
            let (name, e) = match tok.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i32>()
                        .map_err(|_| param(format!("bad exponent in {tok:?}")))?,
                ),
                None => (tok, 1),
            };
            terms.push((name.parse::<Gen>()?, e));
        }
        Ok(Monomial::from_terms(terms))
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_gen() -> impl Strategy<Value = Gen> {
        prop_oneof![
            (1usize..4).prop_map(Gen::Legit),
            (1usize..4, 1usize..4).prop_map(|(a, b)| Gen::Cross(a, b)),
            (1usize..4).prop_map(Gen::Eve),
            (1usize..5).prop_map(Gen::Const),
            (2usize..4).prop_map(Gen::Alpha),
        ]
    }

    fn arb_mono() -> impl Strategy<Value = Monomial> {
        proptest::collection::vec((arb_gen(), -3i32..4), 0..6).prop_map(Monomial::from_terms)
    }

    fn exps(m: &Monomial) -> BTreeMap<Gen, i32> {
        m.terms().iter().copied().collect()
    }

    #[test]
    fn names_round_trip() {
        for g in [
            Gen::Legit(1),
            Gen::Legit(12),
            Gen::Cross(2, 1),
            Gen::Cross(10, 3),
            Gen::Eve(3),
            Gen::Const(4),
            Gen::Alpha(2),
            Gen::Seed(11),
        ] {
            assert_eq!(g.to_string().parse::<Gen>().unwrap(), g);
        }
        assert_eq!(Gen::Cross(2, 1).to_string(), "h_21");
        assert_eq!(Gen::Alpha(2).to_string(), "alpha_2");
        assert!("x_1".parse::<Gen>().is_err());
        assert!("h_123".parse::<Gen>().is_err());
    }

    #[test]
    fn ratio_cancels_to_one() {
        let h = Monomial::gen(Gen::Legit(1));
        assert!(h.div(&h).is_one());
        assert_eq!(h.pow(0), Monomial::one());
        assert_eq!(Monomial::one().to_string(), "1");
    }

    proptest! {
        #[test]
        fn product_adds_exponents(p in arb_mono(), q in arb_mono()) {
            let pq = p.mul(&q);
            let mut want = exps(&p);
            for (g, e) in exps(&q) {
                *want.entry(g).or_insert(0) += e;
            }
            want.retain(|_, e| *e != 0);
            prop_assert_eq!(exps(&pq), want);
            prop_assert!(pq.terms().iter().all(|&(_, e)| e != 0));
            prop_assert!(pq.terms().windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert_eq!(pq.clone(), q.mul(&p));
        }

        #[test]
        fn display_round_trips(p in arb_mono()) {
            prop_assert_eq!(p.to_string().parse::<Monomial>().unwrap(), p);
        }

        #[test]
        fn distinct_monomials_evaluate_apart(p in arb_mono(), q in arb_mono()) {
            prop_assume!(p != q);
            let dist = crate::channel::GainDistribution::default();
            for trial in 0..1000u64 {
                let mut vals = BTreeMap::new();
                for g in p.terms().iter().chain(q.terms()).map(|t| t.0) {
                    let key = match g {
                        Gen::Legit(i) => i as u64,
                        Gen::Cross(a, b) => (10 + a * 10 + b) as u64,
                        Gen::Eve(i) => 200 + i as u64,
                        Gen::Const(i) => 300 + i as u64,
                        Gen::Alpha(i) => 400 + i as u64,
                        Gen::Seed(i) => 500 + i as u64,
                    };
                    let mut rng = crate::seed::substream(trial, crate::seed::Domain::Realization, key, 0);
                    vals.insert(g, dist.sample(&mut rng));
                }
                let (a, b) = (p.eval(&vals).unwrap(), q.eval(&vals).unwrap());
                prop_assert!((a - b).abs() > 1e-12 * a.abs().max(b.abs()));
            }
        }
    }
}
