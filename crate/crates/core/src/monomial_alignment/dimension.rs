//! Parametric monomial families `scale * prod_i factor_i^{r_i}` with every
//! `r_i` in a common integer range.
//!
//! Set relations are decided symbolically. A member's exponent vector is an
//! affine function of the index tuple `r`, so containment in another family
//! reduces to an affine identity plus interval bounds over the index box.

use serde::Serialize;

use super::monomial::{Gen, Monomial};
use crate::error::{param, Error, Result};

/// A family of monomials indexed by a box of integer exponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionSet {
    pub label: String,
    /// Common multiplier applied to every member.
    pub scale: Monomial,
    pub factors: Vec<Monomial>,
    /// Name of each factor's exponent, e.g. `r_21` or `s`.
    pub exponent_names: Vec<String>,
    /// For each factor, an atom that appears in no other factor.
    pub pivots: Vec<Gen>,
    pub low: i32,
    pub high: i32,
}

impl DimensionSet {
    /// Builds a family and locates a pivot atom for every factor.
    pub fn new(
        label: impl Into<String>,
        factors: Vec<Monomial>,
        exponent_names: Vec<String>,
        low: i32,
        high: i32,
    ) -> Result<Self> {
        let label = label.into();
        if high < low {
            return Err(param(format!("{label}: empty exponent range {low}..={high}")));
        }
        if exponent_names.len() != factors.len() {
            return Err(param(format!("{label}: one exponent name per factor")));
        }
        let mut pivots = Vec::with_capacity(factors.len());
        for (i, f) in factors.iter().enumerate() {
            let pivot = f
                .terms()
                .iter()
                .find(|&&(g, e)| {
                    e.abs() == 1
                        && factors
                            .iter()
                            .enumerate()
                            .all(|(j, other)| j == i || !other.contains(g))
                })
                .map(|&(g, _)| g)
                .ok_or_else(|| {
                    Error::Unsupported(format!("{label}: factor {f} has no private atom"))
                })?;
            pivots.push(pivot);
        }
        Ok(Self {
            label,
            scale: Monomial::one(),
            factors,
            exponent_names,
            pivots,
            low,
            high,
        })
    }

    /// The same family multiplied by `by`.
    pub fn scaled(&self, by: &Monomial, label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            scale: self.scale.mul(by),
            ..self.clone()
        }
    }

    /// Number of members. Pivots make the index map injective, so this is
    /// the size of the index box.
    pub fn cardinality(&self) -> Result<u64> {
        let width = (self.high - self.low + 1) as u64;
        width
            .checked_pow(self.factors.len() as u32)
            .ok_or(Error::Capacity {
                what: "dimension set cardinality",
                needed: u128::MAX,
                budget: u64::MAX as u128,
            })
    }

    /// Member for the index tuple `r`.
    pub fn member(&self, r: &[i32]) -> Monomial {
        self.factors
            .iter()
            .zip(r)
            .fold(self.scale.clone(), |acc, (f, &e)| acc.mul(&f.pow(e)))
    }

    /// Index tuple of `x` if it is a member.
    pub fn index_of(&self, x: &Monomial) -> Option<Vec<i32>> {
        let y = x.div(&self.scale);
        let mut r = Vec::with_capacity(self.factors.len());
        for (f, &p) in self.factors.iter().zip(&self.pivots) {
            let e = y.exponent(p) * f.exponent(p);
            if e < self.low || e > self.high {
                return None;
            }
            r.push(e);
        }
        (self.member(&r) == *x).then_some(r)
    }

    pub fn is_member(&self, x: &Monomial) -> bool {
        self.index_of(x).is_some()
    }

    /// All members in lexicographic index order, refusing sets above `budget`.
    pub fn members(&self, budget: u64) -> Result<Vec<Monomial>> {
        let n = self.cardinality()?;
        if n > budget {
            return Err(Error::Capacity {
                what: "dimension set enumeration",
                needed: n as u128,
                budget: budget as u128,
            });
        }
        let mut out = Vec::with_capacity(n as usize);
        let mut r = vec![self.low; self.factors.len()];
        loop {
            out.push(self.member(&r));
            let mut i = r.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if r[i] < self.high {
                    r[i] += 1;
                    break;
                }
                r[i] = self.low;
            }
        }
    }

    fn free_part(&self) -> (Monomial, Vec<&Monomial>) {
        if self.low == self.high {
            let fixed = self
                .factors
                .iter()
                .fold(self.scale.clone(), |acc, f| acc.mul(&f.pow(self.low)));
            (fixed, Vec::new())
        } else {
            (self.scale.clone(), self.factors.iter().collect())
        }
    }

    /// Interval of the exponent of atom `g` over all members.
    pub fn exponent_interval(&self, g: Gen) -> (i64, i64) {
        let (base, free) = self.free_part();
        let c = base.exponent(g) as i64;
        free.iter().fold((c, c), |(lo, hi), f| {
            let a = f.exponent(g) as i64;
            let (x, y) = (a * self.low as i64, a * self.high as i64);
            (lo + x.min(y), hi + x.max(y))
        })
    }

    fn atoms(&self) -> Vec<Gen> {
        let mut v: Vec<Gen> = std::iter::once(&self.scale)
            .chain(&self.factors)
            .flat_map(|m| m.terms().iter().map(|t| t.0))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Decides `self ⊆ other` exactly.
    pub fn subset_of(&self, other: &DimensionSet) -> Relation {
        let (base, free) = self.free_part();
        // Pivot exponents of `other` as affine functions of our free indices.
        let pivot_const: Vec<i64> = other
            .factors
            .iter()
            .zip(&other.pivots)
            .map(|(g, &p)| {
                ((base.exponent(p) - other.scale.exponent(p)) * g.exponent(p)) as i64
            })
            .collect();
        let pivot_coef: Vec<Vec<i64>> = other
            .factors
            .iter()
            .zip(&other.pivots)
            .map(|(g, &p)| {
                free.iter()
                    .map(|f| (f.exponent(p) * g.exponent(p)) as i64)
                    .collect()
            })
            .collect();
        let rebuild = |weights: &dyn Fn(usize) -> i64| {
            other
                .factors
                .iter()
                .enumerate()
                .fold(Monomial::one(), |acc, (j, g)| acc.mul(&g.pow(weights(j) as i32)))
        };
        let residual = base
            .div(&other.scale)
            .div(&rebuild(&|j| pivot_const[j]));
        if !residual.is_one() {
            return Relation::Violated(format!(
                "{} leaves residual {residual} outside {}",
                self.label, other.label
            ));
        }
        for (i, f) in free.iter().enumerate() {
            let residual = f.div(&rebuild(&|j| pivot_coef[j][i]));
            if !residual.is_one() {
                return Relation::Violated(format!(
                    "{}: varying {} leaves residual {residual} outside {}",
                    self.label, self.exponent_names[i], other.label
                ));
            }
        }
        for (j, name) in other.exponent_names.iter().enumerate() {
            let (mut lo, mut hi) = (pivot_const[j], pivot_const[j]);
            let mut at_lo = Vec::with_capacity(free.len());
            let mut at_hi = Vec::with_capacity(free.len());
            for &a in &pivot_coef[j] {
                let (x, y) = (a * self.low as i64, a * self.high as i64);
                lo += x.min(y);
                hi += x.max(y);
                at_lo.push(if x <= y { self.low } else { self.high });
                at_hi.push(if x <= y { self.high } else { self.low });
            }
            let witness = if lo < other.low as i64 {
                Some(at_lo)
            } else if hi > other.high as i64 {
                Some(at_hi)
            } else {
                None
            };
            if let Some(r) = witness {
                let member = if free.is_empty() {
                    base.clone()
                } else {
                    self.member(&r)
                };
                return Relation::Violated(format!(
                    "{} member {member} needs {name} in {lo}..={hi}, {} allows {}..={}",
                    self.label, other.label, other.low, other.high
                ));
            }
        }
        Relation::Holds
    }

    /// Decides disjointness by finding an atom whose exponent ranges over the
    /// two families do not overlap.
    pub fn disjoint_from(&self, other: &DimensionSet) -> Relation {
        let mut atoms = self.atoms();
        atoms.extend(other.atoms());
        atoms.sort();
        atoms.dedup();
        for g in atoms {
            let (a0, a1) = self.exponent_interval(g);
            let (b0, b1) = other.exponent_interval(g);
            if a1 < b0 || b1 < a0 {
                return Relation::Separated(g);
            }
        }
        Relation::Violated(format!(
            "no exponent separates {} from {}",
            self.label, other.label
        ))
    }
}

/// Outcome of a symbolic set relation.
#[derive(Debug, Clone, PartialEq)]
pub enum Relation {
    Holds,
    /// Disjoint because the exponent of this atom never coincides.
    Separated(Gen),
    Violated(String),
}

impl Relation {
    pub fn holds(&self) -> bool {
        !matches!(self, Relation::Violated(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(j: usize, k: usize) -> Monomial {
        Monomial::gen(Gen::Cross(j, k))
    }

    fn fam(label: &str, factors: Vec<Monomial>, low: i32, high: i32) -> DimensionSet {
        let names = (0..factors.len()).map(|i| format!("r{i}")).collect();
        DimensionSet::new(label, factors, names, low, high).unwrap()
    }

    #[test]
    fn enumerated_members_are_distinct_and_recognized() {
        let s = fam("A", vec![h(2, 1), h(1, 2).div(&h(1, 1)), h(2, 2)], 1, 3);
        let members = s.members(1000).unwrap();
        assert_eq!(members.len() as u64, s.cardinality().unwrap());
        let mut sorted = members.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), members.len());
        assert!(members.iter().all(|m| s.is_member(m)));
        assert!(!s.is_member(&h(2, 1)));
    }

    #[test]
    fn shifted_family_is_contained_in_wider_range() {
        let a = fam("A", vec![h(1, 1), h(2, 1)], 1, 2);
        let b = fam("B", vec![h(1, 1), h(2, 1)], 1, 3);
        let shifted = a.scaled(&h(2, 1), "h21 A");
        assert_eq!(shifted.subset_of(&b), Relation::Holds);
        let too_far = a.scaled(&h(2, 1).pow(2), "h21^2 A");
        assert!(!too_far.subset_of(&b).holds());
        let foreign = a.scaled(&h(3, 3), "h33 A");
        assert!(!foreign.subset_of(&b).holds());
    }

    #[test]
    fn symbolic_subset_matches_enumeration() {
        let b = fam("B", vec![h(2, 2), h(1, 2).div(&h(1, 1)), h(2, 1)], 1, 3);
        for (scale, want) in [
            (h(1, 2), false),
            (h(2, 2), true),
            (h(3, 3), false),
            (h(2, 1).pow(2), false),
            (h(1, 2).div(&h(1, 1)), true),
            (Monomial::one(), true),
        ] {
            let a = fam("A", b.factors.clone(), 1, 2).scaled(&scale, "A");
            let enumerated = a.members(1000).unwrap().iter().all(|x| b.is_member(x));
            assert_eq!(enumerated, want, "scale {scale}");
            assert_eq!(a.subset_of(&b).holds(), want, "scale {scale}");
        }
    }

    #[test]
    fn single_point_family_uses_combined_exponents() {
        // With range {1} the member is h11*h12; the family B must contain it
        // even though factor directions differ.
        let a = fam("A", vec![h(1, 1), h(1, 2)], 1, 1);
        let b = fam("B", vec![h(1, 1).mul(&h(1, 2))], 1, 2);
        assert_eq!(a.subset_of(&b), Relation::Holds);
    }

    #[test]
    fn disjointness_by_separating_atom() {
        let a = fam("A", vec![h(1, 1), Monomial::gen(Gen::Const(1))], 1, 2);
        let b = fam("B", vec![h(1, 1), Monomial::gen(Gen::Const(2))], 1, 2);
        assert!(matches!(a.disjoint_from(&b), Relation::Separated(_)));
        assert!(!a.disjoint_from(&a).holds());
    }

    #[test]
    fn factor_without_private_atom_rejected() {
        let r = DimensionSet::new("X", vec![h(1, 1), h(1, 1)], vec!["a".into(), "b".into()], 1, 2);
        assert!(r.is_err());
    }
}
