//! Real interference alignment for the K-user interference channel with an
//! external eavesdropper, fixed gains.
//!
//! Transmitter `k` sends message blocks along `T_j` for `j ∉ {k, k+1}`, a
//! jamming block `u_k` along `T_k` and a second jamming block `ũ_k` along
//! `β_k T_{k+1}`. At every receiver the `2K` jamming blocks and all unintended
//! messages collapse into the `K+1` enlarged families `T̃_1..T̃_{K+1}`.

use serde::Serialize;

use super::dimension::{DimensionSet, Relation};
use super::monomial::{Gen, Monomial};
use crate::error::{param, Error, Result};

fn h(j: usize, k: usize) -> Monomial {
    Monomial::gen(Gen::Cross(j, k))
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::Unsupported(format!(
            "interference alignment construction needs K >= 3, got {k}"
        )));
    }
    Ok(())
}

/// Factors of the `i`-th family (1-based, `i` in `1..=K+1`).
fn family_factors(k_users: usize, i: usize) -> (Vec<Monomial>, Vec<String>) {
    let kk = k_users;
    let mut f = Vec::new();
    let mut names = Vec::new();
    let mut push = |m: Monomial, a: usize, b: usize| {
        f.push(m);
        names.push(if a < 10 && b < 10 {
            format!("r_{a}{b}")
        } else {
            format!("r_{{{a},{b}}}")
        });
    };
    // Rows of the gain matrix that enter as plain powers, and the ratio row.
    let (own_row, ratio_row, ratio_den): (usize, Option<usize>, usize) = match i {
        1 => (1, None, 0),
        _ if i == kk + 1 => (kk, None, 0),
        _ if i == kk => (kk, Some(kk - 1), 2),
        _ => (i, Some(i - 1), 1),
    };
    for col in 1..=kk {
        push(h(own_row, col), own_row, col);
    }
    if let Some(r) = ratio_row {
        for col in (1..=kk).filter(|&c| c != ratio_den) {
            push(h(r, col).div(&h(r, ratio_den)), r, col);
        }
    }
    for row in (1..=kk).filter(|&j| j != own_row && Some(j) != ratio_row) {
        for col in (1..=kk).filter(|&c| c != row) {
            push(h(row, col), row, col);
        }
    }
    f.push(Monomial::gen(Gen::Const(i)));
    names.push("s".into());
    (f, names)
}

fn build_sets(k_users: usize, m: usize, tilde: bool) -> Result<Vec<DimensionSet>> {
    check_k(k_users)?;
    if m == 0 {
        return Err(param("exponent range m must be >= 1"));
    }
    let high = (m + usize::from(tilde)) as i32;
    (1..=k_users + 1)
        .map(|i| {
            let (factors, names) = family_factors(k_users, i);
            let label = if tilde { format!("T~_{i}") } else { format!("T_{i}") };
            DimensionSet::new(label, factors, names, 1, high)
        })
        .collect()
}

/// `T_1..T_{K+1}` with exponents in `{1..m}`.
pub fn build_interference_t_sets(k_users: usize, m: usize) -> Result<Vec<DimensionSet>> {
    build_sets(k_users, m, false)
}

/// `T̃_1..T̃_{K+1}` with exponents in `{1..m+1}`.
pub fn build_interference_ttilde_sets(k_users: usize, m: usize) -> Result<Vec<DimensionSet>> {
    build_sets(k_users, m, true)
}

/// Scaling of the second jamming block of each transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaRule {
    /// `h_{(i+2)1}/h_{i1}` for `i <= K-2`, `h_12/h_{(K-1)2}` for `i = K-1`, 1 for `i = K`.
    #[default]
    General,
    /// `1/h_11`, `1/h_22`, `1` (three users only).
    ThreeUser,
}

/// `β_i` under the given rule.
pub fn beta(rule: BetaRule, k_users: usize, i: usize) -> Result<Monomial> {
    check_k(k_users)?;
    if !(1..=k_users).contains(&i) {
        return Err(param(format!("beta index {i} outside 1..={k_users}")));
    }
    match rule {
        BetaRule::General => Ok(if i + 2 <= k_users {
            h(i + 2, 1).div(&h(i, 1))
        } else if i + 1 == k_users {
            h(1, 2).div(&h(i, 2))
        } else {
            Monomial::one()
        }),
        BetaRule::ThreeUser if k_users == 3 => Ok(if i < 3 {
            h(i, i).inv()
        } else {
            Monomial::one()
        }),
        BetaRule::ThreeUser => Err(Error::Unsupported(
            "the three-user scaling rule only applies to K = 3".into(),
        )),
    }
}

/// Construction knobs, including deliberate corruption for negative tests.
#[derive(Debug, Clone, Default)]
pub struct AlignmentOptions {
    pub beta_rule: BetaRule,
    /// Replaces `β_i` by the given monomial.
    pub beta_override: Vec<(usize, Monomial)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    /// Interference block lies inside an enlarged family.
    Containment,
    /// Two received families share no dimension.
    Disjointness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentCheck {
    pub receiver: usize,
    pub kind: ClaimKind,
    pub claim: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cardinalities {
    pub t: Vec<u64>,
    pub t_tilde: Vec<u64>,
    pub expected_t: u64,
    pub expected_t_tilde: u64,
}

/// Result of the exact alignment verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentReport {
    #[serde(rename = "K")]
    pub k: usize,
    pub m: usize,
    pub beta_rule: BetaRule,
    pub mutated: bool,
    pub cardinalities: Cardinalities,
    pub checks: Vec<AlignmentCheck>,
    /// Size of the union of desired and enlarged families at each receiver.
    #[serde(rename = "M_S")]
    pub m_s: Vec<u64>,
    #[serde(rename = "M_S_formula")]
    pub m_s_formula: u64,
    pub violations: Vec<String>,
}

impl AlignmentReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn checks_passed(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Pass)
            .count()
    }
}

fn pow_u64(base: u64, exp: usize) -> Result<u64> {
    base.checked_pow(exp as u32).ok_or(Error::Capacity {
        what: "alignment cardinality",
        needed: u128::MAX,
        budget: u64::MAX as u128,
    })
}

/// `(K-1) m^{K(K-1)+2} + (K+1)(m+1)^{K(K-1)+2}`.
pub fn m_s_formula(k_users: usize, m: usize) -> Result<u64> {
    let d = k_users * (k_users - 1) + 2;
    let a = pow_u64(m as u64, d)?.checked_mul(k_users as u64 - 1);
    let b = pow_u64(m as u64 + 1, d)?.checked_mul(k_users as u64 + 1);
    a.zip(b)
        .and_then(|(a, b)| a.checked_add(b))
        .ok_or_else(|| param("M_S overflows u64"))
}

/// Verifies every containment and separation claim of the fixed-gain scheme.
pub fn verify_interference_alignment(
    k_users: usize,
    m: usize,
    options: &AlignmentOptions,
) -> Result<AlignmentReport> {
    let t = build_interference_t_sets(k_users, m)?;
    let tt = build_interference_ttilde_sets(k_users, m)?;
    let kk = k_users;
    let betas: Vec<Monomial> = (1..=kk)
        .map(|i| {
            options
                .beta_override
                .iter()
                .find(|(j, _)| *j == i)
                .map(|(_, b)| Ok(b.clone()))
                .unwrap_or_else(|| beta(options.beta_rule, kk, i))
        })
        .collect::<Result<_>>()?;

    let mut checks = Vec::new();
    let mut m_s = Vec::with_capacity(kk);
    for l in 1..=kk {
        let mut desired = Vec::new();
        let contain = |label: String, set: DimensionSet, target: usize, checks: &mut Vec<_>| {
            let rel = set.subset_of(&tt[target - 1]);
            checks.push(make_check(
                l,
                ClaimKind::Containment,
                format!("{label}: {} in {}", set.label, tt[target - 1].label),
                &rel,
            ));
        };
        for k in 1..=kk {
            let gain = h(k, l);
            for j in (1..=kk + 1).filter(|&j| j != k && j != k + 1) {
                let set = t[j - 1].scaled(&gain, format!("h_{k}{l}*T_{j}"));
                if k == l {
                    desired.push(set);
                } else {
                    contain(format!("v_{k}{j}"), set, j, &mut checks);
                }
            }
            let u = t[k - 1].scaled(&gain, format!("h_{k}{l}*T_{k}"));
            contain(format!("u_{k}"), u, k, &mut checks);
            let ut = t[k].scaled(
                &gain.mul(&betas[k - 1]),
                format!("h_{k}{l}*beta_{k}*T_{}", k + 1),
            );
            contain(format!("u~_{k}"), ut, k + 1, &mut checks);
        }
        let mut received: Vec<&DimensionSet> = desired.iter().collect();
        received.extend(tt.iter());
        let mut all_disjoint = true;
        for a in 0..received.len() {
            for b in a + 1..received.len() {
                let rel = received[a].disjoint_from(received[b]);
                all_disjoint &= rel.holds();
                checks.push(make_check(
                    l,
                    ClaimKind::Disjointness,
                    format!("{} and {} disjoint", received[a].label, received[b].label),
                    &rel,
                ));
            }
        }
        let size = received
            .iter()
            .map(|s| s.cardinality())
            .sum::<Result<u64>>()?;
        // Without disjointness the sum only bounds the union from above.
        m_s.push(if all_disjoint { size } else { 0 });
    }

    let d = kk * (kk - 1) + 2;
    let cardinalities = Cardinalities {
        t: t.iter().map(|s| s.cardinality()).collect::<Result<_>>()?,
        t_tilde: tt.iter().map(|s| s.cardinality()).collect::<Result<_>>()?,
        expected_t: pow_u64(m as u64, d)?,
        expected_t_tilde: pow_u64(m as u64 + 1, d)?,
    };
    let formula = m_s_formula(kk, m)?;
    let mut violations: Vec<String> = checks
        .iter()
        .filter(|c| c.status == CheckStatus::Fail)
        .map(|c| format!("receiver {}: {} ({})", c.receiver, c.claim, c.detail))
        .collect();
    for (i, &c) in cardinalities.t.iter().enumerate() {
        if c != cardinalities.expected_t {
            violations.push(format!("|T_{}| = {c}, expected {}", i + 1, cardinalities.expected_t));
        }
    }
    for (i, &c) in cardinalities.t_tilde.iter().enumerate() {
        if c != cardinalities.expected_t_tilde {
            violations.push(format!(
                "|T~_{}| = {c}, expected {}",
                i + 1,
                cardinalities.expected_t_tilde
            ));
        }
    }
    for (l, &s) in m_s.iter().enumerate() {
        if s != formula {
            violations.push(format!("receiver {}: M_S = {s}, expected {formula}", l + 1));
        }
    }
    Ok(AlignmentReport {
        k: kk,
        m,
        beta_rule: options.beta_rule,
        mutated: !options.beta_override.is_empty(),
        cardinalities,
        checks,
        m_s,
        m_s_formula: formula,
        violations,
    })
}

fn make_check(receiver: usize, kind: ClaimKind, claim: String, rel: &Relation) -> AlignmentCheck {
    let (status, detail) = match rel {
        Relation::Holds => (CheckStatus::Pass, "exact exponent identity".to_string()),
        Relation::Separated(g) => (CheckStatus::Pass, format!("separated by exponent of {g}")),
        Relation::Violated(why) => (CheckStatus::Fail, why.clone()),
    };
    AlignmentCheck {
        receiver,
        kind,
        claim,
        status,
        detail,
    }
}
