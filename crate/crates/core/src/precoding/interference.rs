//! Asymptotic cooperative-jamming alignment for the K-user interference
//! channel with an external eavesdropper.
//!
//! Every precoder column is `(prod_T T^{alpha_T}) w` for a generator list
//! `T_1..T_Gamma` of diagonal channel matrices, an exponent tuple `alpha` and
//! a random seed vector `w`. Columns are kept both symbolically (a monomial in
//! the link gains and the seed) and numerically (one entry per slot), so that
//! a containment `A <= B` can be decided exactly by column lookup and
//! independently by numeric rank.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Observation;
use crate::channel::{ChannelModel, ChannelRealization};
use crate::error::{param, Error, Result};
use crate::linalg::{hcat, numeric_rank};
use crate::monomial_alignment::{Gen, Monomial};
use crate::seed::{substream, Domain};

/// Default cap on the total number of precoder matrix entries.
pub const DEFAULT_PRECODER_ENTRY_BUDGET: u128 = 20_000_000;

const OPAQUE_KEY_BASE: u64 = 1 << 40;

fn h(tx: usize, rx: usize) -> Monomial {
    Monomial::gen(Gen::Cross(tx, rx))
}

/// `prod num / prod den` over links `(tx, rx)`.
fn ratio(num: &[(usize, usize)], den: &[(usize, usize)]) -> Monomial {
    Monomial::from_terms(
        num.iter()
            .map(|&(a, b)| (Gen::Cross(a, b), 1))
            .chain(den.iter().map(|&(a, b)| (Gen::Cross(a, b), -1))),
    )
}

/// Where a generator table comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorSource {
    /// The explicit three-user table.
    Table,
    /// The construction for arbitrary K.
    General,
}

/// Generator lists for targets `1..=K+1`; `targets[k-1]` generates `P~_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorLists {
    #[serde(rename = "K")]
    pub k: usize,
    pub source: GeneratorSource,
    pub targets: Vec<Vec<Monomial>>,
}

impl GeneratorLists {
    pub fn gamma(&self) -> usize {
        (self.k - 1) * (self.k - 1)
    }
}

/// The explicit three-user table, listed per target column.
pub fn table_generators() -> GeneratorLists {
    let targets = vec![
        vec![
            ratio(&[(2, 1)], &[(1, 1)]),
            ratio(&[(3, 1)], &[(1, 1)]),
            ratio(&[(3, 2)], &[(1, 2)]),
            ratio(&[(2, 3)], &[(1, 3)]),
        ],
        vec![
            ratio(&[(3, 1)], &[(2, 1)]),
            ratio(&[(1, 2), (3, 1)], &[(2, 2), (1, 1)]),
            ratio(&[(3, 2)], &[(2, 2)]),
            ratio(&[(1, 3), (3, 1)], &[(2, 3), (1, 1)]),
        ],
        vec![
            ratio(&[(2, 1), (1, 2)], &[(3, 1), (2, 2)]),
            ratio(&[(1, 2)], &[(3, 2)]),
            ratio(&[(2, 3), (1, 2)], &[(3, 3), (2, 2)]),
            ratio(&[(1, 3)], &[(3, 3)]),
        ],
        vec![
            ratio(&[(2, 1)], &[(3, 1)]),
            ratio(&[(1, 2)], &[(3, 2)]),
            ratio(&[(2, 3)], &[(3, 3)]),
            ratio(&[(1, 3)], &[(3, 3)]),
        ],
    ];
    GeneratorLists {
        k: 3,
        source: GeneratorSource::Table,
        targets,
    }
}

/// Generator sets for arbitrary `K >= 3`, deduplicated as monomials.
pub fn general_generators(k_users: usize) -> Result<GeneratorLists> {
    if k_users < 3 {
        return Err(Error::Unsupported(format!(
            "cooperative-jamming alignment needs K >= 3, got {k_users}"
        )));
    }
    let kk = k_users;
    let others = |i: usize| (1..=kk).filter(move |&l| l != i);
    let mut targets = Vec::with_capacity(kk + 1);
    targets.push(
        (2..=kk)
            .flat_map(|k| others(k).map(move |l| ratio(&[(k, l)], &[(1, l)])))
            .collect::<Vec<_>>(),
    );
    for k in 2..=kk {
        let mut list: Vec<Monomial> = Vec::new();
        let mut push = |m: Monomial| {
            if !list.contains(&m) {
                list.push(m);
            }
        };
        for i in (1..=kk).filter(|&i| i + 1 != k && i != k) {
            for l in others(i) {
                push(ratio(&[(i, l)], &[(k, l)]));
            }
        }
        for l in 1..=kk {
            let m = if k < kk {
                ratio(&[(k - 1, l), (k + 1, 1)], &[(k, l), (k - 1, 1)])
            } else {
                ratio(&[(kk - 1, l), (1, 2)], &[(kk, l), (kk - 1, 2)])
            };
            push(m);
        }
        targets.push(list);
    }
    targets.push(
        (1..kk)
            .flat_map(|k| others(k).map(move |l| ratio(&[(k, l)], &[(kk, l)])))
            .collect(),
    );
    let lists = GeneratorLists {
        k: kk,
        source: GeneratorSource::General,
        targets,
    };
    let gamma = lists.gamma();
    if let Some((i, t)) = lists.targets.iter().enumerate().find(|(_, t)| t.len() != gamma) {
        return Err(Error::Numeric(format!(
            "target {} has {} generators, expected {gamma}",
            i + 1,
            t.len()
        )));
    }
    Ok(lists)
}

/// Generator lists: the explicit table for `K = 3`, the general sets
/// otherwise.
pub fn build_cj_generators(k_users: usize) -> Result<GeneratorLists> {
    if k_users == 3 {
        Ok(table_generators())
    } else {
        general_generators(k_users)
    }
}

/// `M_n = (K-1) n^Gamma + (K+1)(n+1)^Gamma`.
pub fn precoder_dimension(k_users: usize, n: usize) -> Option<u128> {
    let gamma = u32::try_from((k_users - 1) * (k_users - 1)).ok()?;
    let small = (n as u128).checked_pow(gamma)?;
    let large = (n as u128 + 1).checked_pow(gamma)?;
    ((k_users as u128 - 1) * small).checked_add((k_users as u128 + 1).checked_mul(large)?)
}

/// All tuples in `{1..=hi}^len`, lexicographic with the last entry fastest.
fn exponent_tuples(len: usize, hi: u32) -> Vec<Vec<u32>> {
    let count = (hi as usize).pow(len as u32);
    let mut out = Vec::with_capacity(count);
    let mut cur = vec![1u32; len];
    for _ in 0..count {
        out.push(cur.clone());
        for d in (0..len).rev() {
            if cur[d] < hi {
                cur[d] += 1;
                break;
            }
            cur[d] = 1;
        }
    }
    out
}

/// Identifies a precoder family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BlockId {
    PTilde(usize),
    Q(usize),
    QTilde(usize),
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockId::PTilde(k) => write!(f, "P~_{k}"),
            BlockId::Q(k) => write!(f, "Q_{k}"),
            BlockId::QTilde(k) => write!(f, "Q~_{k}"),
        }
    }
}

/// One precoder column: a monomial in link gains and seeds, optionally times
/// an opaque random vector with no symbolic structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Column {
    pub mono: Monomial,
    pub opaque: Option<u64>,
}

impl Column {
    fn scaled(&self, by: &Monomial) -> Column {
        Column {
            mono: self.mono.mul(by),
            opaque: self.opaque,
        }
    }
}

/// A precoder matrix with its symbolic columns and, where it is generated
/// directly, the exponent tuple of every column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub id: BlockId,
    pub columns: Vec<Column>,
    pub exponents: Vec<Vec<u32>>,
}

/// Diagonal matrix given by its per-slot entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalChannelMatrix {
    pub label: String,
    pub entries: Vec<f64>,
}

impl DiagonalChannelMatrix {
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            label: format!("{}*{}", self.label, other.label),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn inv(&self) -> Self {
        Self {
            label: format!("({})^-1", self.label),
            entries: self.entries.iter().map(|a| 1.0 / a).collect(),
        }
    }
}

/// Build options for [`build_asymptotic_precoders`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecoderOptions {
    /// `None` picks the explicit table for `K = 3` and the general sets otherwise.
    pub source: Option<GeneratorSource>,
    pub entry_budget: u128,
}

impl Default for PrecoderOptions {
    fn default() -> Self {
        Self {
            source: None,
            entry_budget: DEFAULT_PRECODER_ENTRY_BUDGET,
        }
    }
}

/// All precoders of the scheme together with the realization they act on.
#[derive(Debug, Clone)]
pub struct PrecoderSet {
    pub k: usize,
    pub n: usize,
    pub gamma: usize,
    pub m_n: usize,
    pub seed: u64,
    pub generators: GeneratorLists,
    /// `seeds[k-1][t]` is entry `t` of `w_k`.
    pub seeds: Vec<Vec<f64>>,
    pub blocks: BTreeMap<BlockId, Block>,
    /// Blocks replaced by random matrices.
    pub mutated: Vec<BlockId>,
    opaque: BTreeMap<u64, Vec<f64>>,
    realization: ChannelRealization,
}

/// JSON summary of a precoder set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecoderSummary {
    #[serde(rename = "K")]
    pub k: usize,
    pub n: usize,
    #[serde(rename = "Gamma")]
    pub gamma: usize,
    #[serde(rename = "M_n")]
    pub m_n: usize,
    pub source: GeneratorSource,
    pub column_counts: BTreeMap<String, usize>,
    pub seed: u64,
    pub realization_seed: u64,
    pub mutated: Vec<String>,
}

/// Builds every precoder on the first `M_n` slots of a fading interference
/// realization. Seed vectors are drawn from the realization's gain
/// distribution under `seed`.
pub fn build_asymptotic_precoders(
    k_users: usize,
    n: usize,
    realization: &ChannelRealization,
    seed: u64,
    options: &PrecoderOptions,
) -> Result<PrecoderSet> {
    if n == 0 {
        return Err(param("n must be >= 1"));
    }
    let generators = match options.source {
        None => build_cj_generators(k_users)?,
        Some(GeneratorSource::General) => general_generators(k_users)?,
        Some(GeneratorSource::Table) if k_users == 3 => table_generators(),
        Some(GeneratorSource::Table) => {
            return Err(Error::Unsupported(format!(
                "the explicit generator table exists only for K = 3, got {k_users}"
            )))
        }
    };
    realization.require_model(ChannelModel::Interference { users: k_users })?;
    realization.require_fixed(false)?;
    let gamma = generators.gamma();
    let m_n = precoder_dimension(k_users, n).ok_or(Error::Capacity {
        what: "precoder dimension",
        needed: u128::MAX,
        budget: options.entry_budget,
    })?;
    let small = (n as u128).pow(gamma as u32);
    let large = (n as u128 + 1).pow(gamma as u32);
    // P~_1..P~_{K+1}, Q_1..Q_K, Q~_K, and the K-1 derived Q~.
    let columns = (k_users as u128 + 1) * small + (k_users as u128 + 1) * large
        + (k_users as u128 - 1) * small;
    let entries = m_n.saturating_mul(columns);
    if entries > options.entry_budget {
        return Err(Error::Capacity {
            what: "precoder matrix entries",
            needed: entries,
            budget: options.entry_budget,
        });
    }
    let m_n = m_n as usize;
    if realization.slots() < m_n {
        return Err(Error::Mode(format!(
            "precoders need {m_n} slots, realization has {}",
            realization.slots()
        )));
    }
    let dist = realization.distribution();
    let seeds: Vec<Vec<f64>> = (1..=k_users + 1)
        .map(|k| {
            (0..m_n)
                .map(|t| dist.sample(&mut substream(seed, Domain::PrecoderSeed, k as u64, t as u64)))
                .collect()
        })
        .collect();

    let family = |id: BlockId, target: usize, hi: u32| -> Block {
        let gens = &generators.targets[target - 1];
        let exponents = exponent_tuples(gamma, hi);
        let columns = exponents
            .par_iter()
            .map(|alpha| {
                let terms = gens
                    .iter()
                    .zip(alpha)
                    .flat_map(|(g, &a)| g.terms().iter().map(move |&(x, e)| (x, e * a as i32)))
                    .chain(std::iter::once((Gen::Seed(target), 1)));
                Column {
                    mono: Monomial::from_terms(terms),
                    opaque: None,
                }
            })
            .collect();
        Block {
            id,
            columns,
            exponents,
        }
    };
    let n32 = n as u32;
    let mut blocks = BTreeMap::new();
    for k in 1..=k_users + 1 {
        blocks.insert(BlockId::PTilde(k), family(BlockId::PTilde(k), k, n32));
    }
    for k in 1..=k_users {
        blocks.insert(BlockId::Q(k), family(BlockId::Q(k), k, n32 + 1));
    }
    blocks.insert(
        BlockId::QTilde(k_users),
        family(BlockId::QTilde(k_users), k_users + 1, n32 + 1),
    );
    for (j, scale, source) in derived_q_tilde(k_users) {
        let src: &Block = &blocks[&BlockId::PTilde(source)];
        let derived = Block {
            id: BlockId::QTilde(j),
            columns: src.columns.iter().map(|c| c.scaled(&scale)).collect(),
            exponents: src.exponents.clone(),
        };
        blocks.insert(BlockId::QTilde(j), derived);
    }
    Ok(PrecoderSet {
        k: k_users,
        n,
        gamma,
        m_n,
        seed,
        generators,
        seeds,
        blocks,
        mutated: Vec::new(),
        opaque: BTreeMap::new(),
        realization: realization.clone(),
    })
}

/// `(j, D, k)` with `Q~_j = D P~_k` for `j = 1..K-1`.
fn derived_q_tilde(k_users: usize) -> Vec<(usize, Monomial, usize)> {
    let kk = k_users;
    let mut out: Vec<_> = (1..=kk - 2)
        .map(|j| (j, ratio(&[(j + 2, 1)], &[(j, 1)]), j + 1))
        .collect();
    out.push((kk - 1, ratio(&[(1, 2)], &[(kk - 1, 2)]), kk));
    out
}

/// A precoder block premultiplied by a diagonal channel monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub scale: Monomial,
    pub block: BlockId,
}

impl Term {
    fn new(scale: Monomial, block: BlockId) -> Self {
        Self { scale, block }
    }
}

/// Family of an alignment equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationFamily {
    /// Interference at a receiver falls inside an aligned jamming block.
    Table,
    /// A generator shifts `P~_k` into its jamming family.
    Generator,
}

/// A column-space containment `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentEquation {
    pub family: EquationFamily,
    pub receiver: Option<usize>,
    pub label: String,
    pub lhs: Term,
    pub rhs: Term,
}

/// Verdicts for one equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationCheck {
    pub family: EquationFamily,
    pub receiver: Option<usize>,
    pub equation: String,
    pub exact: bool,
    /// Columns of the left side missing from the right side.
    pub missing_columns: usize,
    pub numeric: bool,
    pub rank_rhs: usize,
    pub rank_joint: usize,
}

/// Result of [`verify_alignment_equations`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecodingReport {
    #[serde(rename = "K")]
    pub k: usize,
    pub n: usize,
    #[serde(rename = "M_n")]
    pub m_n: usize,
    pub rank_tol: f64,
    pub mutated: Vec<String>,
    pub table_passed: usize,
    pub table_total: usize,
    pub generator_passed: usize,
    pub generator_total: usize,
    /// Exact and numeric verdicts coincide on every equation.
    pub verdicts_agree: bool,
    pub checks: Vec<EquationCheck>,
}

impl PrecodingReport {
    pub fn passed(&self) -> bool {
        self.table_passed == self.table_total && self.generator_passed == self.generator_total
    }
}

/// Receiver and eavesdropper matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverMatrices {
    /// `Lambda_l = [desired | aligned jamming]`.
    pub lambda: Vec<DMatrix<f64>>,
    /// Every interfering column at receiver `l`.
    pub interference: Vec<DMatrix<f64>>,
    /// Jamming as seen by the eavesdropper.
    pub eve: DMatrix<f64>,
}

/// Numeric ranks of the receiver and eavesdropper matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    #[serde(rename = "K")]
    pub k: usize,
    pub n: usize,
    #[serde(rename = "M_n")]
    pub m_n: usize,
    pub rank_tol: f64,
    pub lambda_ranks: Vec<usize>,
    pub interference_ranks: Vec<usize>,
    pub interference_bound: usize,
    pub eve_rank: usize,
    pub passed: bool,
}

impl PrecoderSet {
    pub fn realization(&self) -> &ChannelRealization {
        &self.realization
    }

    pub fn block(&self, id: BlockId) -> Result<&Block> {
        self.blocks
            .get(&id)
            .ok_or_else(|| param(format!("no precoder block {id}")))
    }

    /// Precoder `P_kj` of message `V_kj`; it depends only on the target `j`.
    pub fn message_block(target: usize) -> BlockId {
        BlockId::PTilde(target)
    }

    /// Targets `j` for which transmitter `tx` sends a message `V_{tx j}`.
    pub fn message_targets(&self, tx: usize) -> Vec<usize> {
        (1..=self.k + 1).filter(|&j| j != tx && j != tx + 1).collect()
    }

    fn atom(&self, g: Gen, t: usize) -> f64 {
        match g {
            Gen::Cross(tx, rx) => self.realization.h(tx, rx, t),
            Gen::Eve(tx) => self.realization.g(tx, t),
            Gen::Seed(k) => self.seeds[k - 1][t],
            other => panic!("generator {other} has no per-slot value in this scheme"),
        }
    }

    fn eval(&self, m: &Monomial, t: usize) -> f64 {
        m.terms()
            .iter()
            .map(|&(g, e)| self.atom(g, t).powi(e))
            .product()
    }

    /// The diagonal matrix of a gain monomial.
    pub fn diagonal(&self, m: &Monomial) -> DiagonalChannelMatrix {
        DiagonalChannelMatrix {
            label: m.to_string(),
            entries: (0..self.m_n).map(|t| self.eval(m, t)).collect(),
        }
    }

    /// Numeric matrix of `scale * block`.
    pub fn term_matrix(&self, term: &Term) -> Result<DMatrix<f64>> {
        let block = self.block(term.block)?;
        let rows = self.m_n;
        let data: Vec<f64> = block
            .columns
            .par_iter()
            .flat_map_iter(|c| {
                let mono = c.mono.mul(&term.scale);
                let opaque = c.opaque.map(|id| &self.opaque[&id]);
                (0..rows).map(move |t| {
                    let v = self.eval(&mono, t);
                    opaque.map_or(v, |o| v * o[t])
                })
            })
            .collect();
        Ok(DMatrix::from_vec(rows, block.columns.len(), data))
    }

    fn stack(&self, terms: &[Term]) -> Result<DMatrix<f64>> {
        let parts = terms
            .iter()
            .map(|t| self.term_matrix(t))
            .collect::<Result<Vec<_>>>()?;
        if parts.is_empty() {
            return Ok(DMatrix::zeros(self.m_n, 0));
        }
        hcat(&parts.iter().collect::<Vec<_>>())
    }

    /// Symbolic columns of `scale * block`.
    pub fn term_columns(&self, term: &Term) -> Result<Vec<Column>> {
        Ok(self
            .block(term.block)?
            .columns
            .iter()
            .map(|c| c.scaled(&term.scale))
            .collect())
    }

    /// Replaces a block by a random matrix with no symbolic structure.
    pub fn with_random_block(mut self, id: BlockId, seed: u64) -> Result<Self> {
        let cols = self.block(id)?.columns.len();
        let dist = *self.realization.distribution();
        let base = OPAQUE_KEY_BASE + self.opaque.len() as u64;
        let mut columns = Vec::with_capacity(cols);
        for c in 0..cols as u64 {
            let key = base + (self.mutated.len() as u64) * (1 << 20) + c;
            let values = (0..self.m_n)
                .map(|t| dist.sample(&mut substream(seed, Domain::PrecoderSeed, key, t as u64)))
                .collect();
            self.opaque.insert(key, values);
            columns.push(Column {
                mono: Monomial::one(),
                opaque: Some(key),
            });
        }
        let block = self.blocks.get_mut(&id).expect("checked above");
        block.columns = columns;
        block.exponents.clear();
        self.mutated.push(id);
        Ok(self)
    }

    pub fn summary(&self) -> PrecoderSummary {
        PrecoderSummary {
            k: self.k,
            n: self.n,
            gamma: self.gamma,
            m_n: self.m_n,
            source: self.generators.source,
            column_counts: self
                .blocks
                .iter()
                .map(|(id, b)| (id.to_string(), b.columns.len()))
                .collect(),
            seed: self.seed,
            realization_seed: self.realization.seed(),
            mutated: self.mutated.iter().map(|b| b.to_string()).collect(),
        }
    }

    /// Interference alignment equations at every receiver followed by the
    /// generator shift equations.
    pub fn alignment_equations(&self) -> Vec<AlignmentEquation> {
        let kk = self.k;
        let mut out = Vec::new();
        for l in 1..=kk {
            for tx in (1..=kk).filter(|&tx| tx != l) {
                for j in self.message_targets(tx) {
                    let (rhs_tx, rhs_block) = if j <= kk {
                        (j, BlockId::Q(j))
                    } else {
                        (kk, BlockId::QTilde(kk))
                    };
                    out.push(AlignmentEquation {
                        family: EquationFamily::Table,
                        receiver: Some(l),
                        label: format!("H_{tx}{l}*P_{tx}{j} <= H_{rhs_tx}{l}*{rhs_block}"),
                        lhs: Term::new(h(tx, l), Self::message_block(j)),
                        rhs: Term::new(h(rhs_tx, l), rhs_block),
                    });
                }
            }
            for k in 1..kk {
                out.push(AlignmentEquation {
                    family: EquationFamily::Table,
                    receiver: Some(l),
                    label: format!("H_{k}{l}*Q~_{k} <= H_{}{l}*Q_{}", k + 1, k + 1),
                    lhs: Term::new(h(k, l), BlockId::QTilde(k)),
                    rhs: Term::new(h(k + 1, l), BlockId::Q(k + 1)),
                });
            }
        }
        for (i, gens) in self.generators.targets.iter().enumerate() {
            let target = i + 1;
            let rhs = if target <= kk {
                BlockId::Q(target)
            } else {
                BlockId::QTilde(kk)
            };
            for (j, g) in gens.iter().enumerate() {
                out.push(AlignmentEquation {
                    family: EquationFamily::Generator,
                    receiver: None,
                    label: format!("T_{target},{}*P~_{target} <= {rhs}  [T = {g}]", j + 1),
                    lhs: Term::new(g.clone(), BlockId::PTilde(target)),
                    rhs: Term::new(Monomial::one(), rhs),
                });
            }
        }
        out
    }

    fn desired_terms(&self, l: usize) -> Vec<Term> {
        self.message_targets(l)
            .into_iter()
            .map(|j| Term::new(h(l, l), Self::message_block(j)))
            .collect()
    }

    fn aligned_jamming_terms(&self, l: usize) -> Vec<Term> {
        let mut t: Vec<Term> = (1..=self.k)
            .map(|k| Term::new(h(k, l), BlockId::Q(k)))
            .collect();
        t.push(Term::new(h(self.k, l), BlockId::QTilde(self.k)));
        t
    }

    fn interference_terms(&self, l: usize) -> Vec<Term> {
        let mut t = Vec::new();
        for tx in (1..=self.k).filter(|&tx| tx != l) {
            for j in self.message_targets(tx) {
                t.push(Term::new(h(tx, l), Self::message_block(j)));
            }
        }
        for k in 1..=self.k {
            t.push(Term::new(h(k, l), BlockId::Q(k)));
            t.push(Term::new(h(k, l), BlockId::QTilde(k)));
        }
        t
    }

    fn eve_jamming_terms(&self) -> Vec<Term> {
        let mut t = Vec::new();
        for k in 1..=self.k {
            let g = Monomial::gen(Gen::Eve(k));
            t.push(Term::new(g.clone(), BlockId::Q(k)));
            t.push(Term::new(g, BlockId::QTilde(k)));
        }
        t
    }

    fn eve_message_terms(&self) -> Vec<Term> {
        let mut t = Vec::new();
        for tx in 1..=self.k {
            for j in self.message_targets(tx) {
                t.push(Term::new(Monomial::gen(Gen::Eve(tx)), Self::message_block(j)));
            }
        }
        t
    }

    /// `Lambda_l`, the full interference `I_l` of every receiver and `I_E`.
    pub fn assemble_receiver_and_eve_matrices(&self) -> Result<ReceiverMatrices> {
        let per_rx = (1..=self.k)
            .into_par_iter()
            .map(|l| {
                let mut lambda_terms = self.desired_terms(l);
                lambda_terms.extend(self.aligned_jamming_terms(l));
                Ok((self.stack(&lambda_terms)?, self.stack(&self.interference_terms(l))?))
            })
            .collect::<Result<Vec<_>>>()?;
        let (lambda, interference) = per_rx.into_iter().unzip();
        Ok(ReceiverMatrices {
            lambda,
            interference,
            eve: self.stack(&self.eve_jamming_terms())?,
        })
    }

    /// Ranks of `Lambda_l`, `I_l` and `I_E` against their targets.
    pub fn rank_report(&self, tol: f64) -> Result<RankReport> {
        let m = self.assemble_receiver_and_eve_matrices()?;
        let lambda_ranks: Vec<usize> = m.lambda.par_iter().map(|a| numeric_rank(a, tol)).collect();
        let interference_ranks: Vec<usize> =
            m.interference.par_iter().map(|a| numeric_rank(a, tol)).collect();
        let eve_rank = numeric_rank(&m.eve, tol);
        let bound = (self.k + 1) * (self.n + 1).pow(self.gamma as u32);
        let passed = lambda_ranks.iter().all(|&r| r == self.m_n)
            && interference_ranks.iter().all(|&r| r <= bound)
            && eve_rank == self.m_n
            && m.lambda.iter().all(|a| a.ncols() == self.m_n)
            && m.eve.ncols() == self.m_n;
        Ok(RankReport {
            k: self.k,
            n: self.n,
            m_n: self.m_n,
            rank_tol: tol,
            lambda_ranks,
            interference_ranks,
            interference_bound: bound,
            eve_rank,
            passed,
        })
    }

    /// Receiver `l`: its own messages against all interference and jamming.
    pub fn legit_observation(&self, l: usize) -> Result<Observation> {
        if !(1..=self.k).contains(&l) {
            return Err(param(format!("receiver must be in 1..={}, got {l}", self.k)));
        }
        Observation::new(
            self.stack(&self.desired_terms(l))?,
            self.stack(&self.interference_terms(l))?,
        )
    }

    /// Eavesdropper: every message against all jamming.
    pub fn eve_observation(&self) -> Result<Observation> {
        Observation::new(
            self.stack(&self.eve_message_terms())?,
            self.stack(&self.eve_jamming_terms())?,
        )
    }
}

/// Checks every alignment equation exactly (column lookup) and numerically
/// (`rank([A B]) == rank(B)`).
pub fn verify_alignment_equations(set: &PrecoderSet, tol: f64) -> Result<PrecodingReport> {
    let equations = set.alignment_equations();
    let checks = equations
        .par_iter()
        .map(|eq| {
            let rhs_cols: HashSet<Column> = set.term_columns(&eq.rhs)?.into_iter().collect();
            let missing = set
                .term_columns(&eq.lhs)?
                .iter()
                .filter(|c| !rhs_cols.contains(c))
                .count();
            let a = set.term_matrix(&eq.lhs)?;
            let b = set.term_matrix(&eq.rhs)?;
            let rank_rhs = numeric_rank(&b, tol);
            let rank_joint = numeric_rank(&hcat(&[&a, &b])?, tol);
            Ok(EquationCheck {
                family: eq.family,
                receiver: eq.receiver,
                equation: eq.label.clone(),
                exact: missing == 0,
                missing_columns: missing,
                numeric: rank_joint == rank_rhs,
                rank_rhs,
                rank_joint,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let count = |f: EquationFamily, pass: bool| {
        checks
            .iter()
            .filter(|c| c.family == f && (!pass || (c.exact && c.numeric)))
            .count()
    };
    Ok(PrecodingReport {
        k: set.k,
        n: set.n,
        m_n: set.m_n,
        rank_tol: tol,
        mutated: set.mutated.iter().map(|b| b.to_string()).collect(),
        table_passed: count(EquationFamily::Table, true),
        table_total: count(EquationFamily::Table, false),
        generator_passed: count(EquationFamily::Generator, true),
        generator_total: count(EquationFamily::Generator, false),
        verdicts_agree: checks.iter().all(|c| c.exact == c.numeric),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, GainDistribution};
    use crate::linalg::DEFAULT_RANK_TOL;

    fn realization(k: usize, n: usize, seed: u64) -> ChannelRealization {
        let slots = precoder_dimension(k, n).unwrap() as usize;
        let model = ChannelModel::Interference { users: k };
        sample_channel(model, GainDistribution::default(), slots, false, seed).unwrap()
    }

    fn precoders(k: usize, n: usize, seed: u64) -> PrecoderSet {
        build_asymptotic_precoders(k, n, &realization(k, n, seed), seed + 1, &Default::default())
            .unwrap()
    }

    fn as_set(v: &[Monomial]) -> std::collections::BTreeSet<Monomial> {
        v.iter().cloned().collect()
    }

    #[test]
    fn table_first_generator() {
        let t = table_generators();
        assert_eq!(t.targets[0][0], "h_11^-1 h_21".parse().unwrap());
        assert!(t.targets.iter().all(|c| c.len() == 4));
    }

    #[test]
    fn table_matches_general_construction() {
        let t = table_generators();
        let g = general_generators(3).unwrap();
        for (a, b) in t.targets.iter().zip(&g.targets) {
            assert_eq!(as_set(a), as_set(b));
        }
    }

    #[test]
    fn general_sizes() {
        for k in 3..=6 {
            let g = general_generators(k).unwrap();
            assert_eq!(g.targets.len(), k + 1);
            assert!(g.targets.iter().all(|t| t.len() == (k - 1) * (k - 1)));
        }
        assert!(matches!(general_generators(2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn dimensions() {
        assert_eq!(precoder_dimension(3, 1), Some(66));
        assert_eq!(precoder_dimension(3, 2), Some(356));
        let p = precoders(3, 1, 1);
        assert_eq!(p.gamma, 4);
        assert_eq!(p.term_matrix(&Term::new(Monomial::one(), BlockId::PTilde(1))).unwrap().shape(), (66, 1));
        assert_eq!(p.term_matrix(&Term::new(Monomial::one(), BlockId::Q(2))).unwrap().shape(), (66, 16));
    }

    #[test]
    fn exponent_tuples_are_lexicographic_and_distinct() {
        let t = exponent_tuples(3, 2);
        assert_eq!(t.len(), 8);
        assert_eq!(t[0], vec![1, 1, 1]);
        assert_eq!(t[1], vec![1, 1, 2]);
        assert_eq!(t[7], vec![2, 2, 2]);
        let mut sorted = t.clone();
        sorted.sort();
        assert_eq!(sorted, t);
    }

    #[test]
    fn columns_follow_exponents_and_are_distinct() {
        let p = precoders(3, 2, 4);
        for block in p.blocks.values() {
            let set: HashSet<&Column> = block.columns.iter().collect();
            assert_eq!(set.len(), block.columns.len(), "{}", block.id);
        }
        let q = &p.blocks[&BlockId::Q(2)];
        assert_eq!(q.columns.len(), 81);
        let gens = &p.generators.targets[1];
        for (alpha, col) in q.exponents.iter().zip(&q.columns) {
            let mut m = Monomial::gen(Gen::Seed(2));
            for (g, &a) in gens.iter().zip(alpha) {
                m = m.mul(&g.pow(a as i32));
            }
            assert_eq!(m, col.mono);
        }
        let qm = p.term_matrix(&Term::new(Monomial::one(), BlockId::Q(2))).unwrap();
        let (alpha, col) = (&q.exponents[5], 5);
        for t in 0..p.m_n {
            let mut v = p.seeds[1][t];
            for (g, &a) in gens.iter().zip(alpha) {
                v *= p.diagonal(g).entries[t].powi(a as i32);
            }
            assert!((v - qm[(t, col)]).abs() <= 1e-12 * v.abs());
        }
    }

    #[test]
    fn generator_shift_stays_inside_family() {
        let p = precoders(3, 2, 5);
        for (i, gens) in p.generators.targets.iter().enumerate() {
            let rhs = if i < 3 { BlockId::Q(i + 1) } else { BlockId::QTilde(3) };
            let cols: HashSet<Column> = p.blocks[&rhs].columns.iter().cloned().collect();
            for g in gens {
                for c in &p.blocks[&BlockId::PTilde(i + 1)].columns {
                    assert!(cols.contains(&c.scaled(g)));
                }
            }
        }
    }

    #[test]
    fn derived_selections_for_three_users() {
        let p = precoders(3, 1, 2);
        let q1 = &p.blocks[&BlockId::QTilde(1)].columns;
        let expect = ratio(&[(3, 1)], &[(1, 1)]);
        assert_eq!(q1, &vec![p.blocks[&BlockId::PTilde(2)].columns[0].scaled(&expect)]);
        let q2 = &p.blocks[&BlockId::QTilde(2)].columns;
        let expect = ratio(&[(1, 2)], &[(2, 2)]);
        assert_eq!(q2, &vec![p.blocks[&BlockId::PTilde(3)].columns[0].scaled(&expect)]);
        assert_eq!(p.message_targets(1), vec![3, 4]);
        assert_eq!(p.message_targets(2), vec![1, 4]);
        assert_eq!(p.message_targets(3), vec![1, 2]);
    }

    #[test]
    fn equations_match_three_user_table() {
        let p = precoders(3, 1, 3);
        let got: Vec<String> = p
            .alignment_equations()
            .into_iter()
            .filter(|e| e.family == EquationFamily::Table)
            .map(|e| e.label)
            .collect();
        let table = [
            "H_21*P_21 <= H_11*Q_1", "H_31*P_31 <= H_11*Q_1", "H_11*Q~_1 <= H_21*Q_2",
            "H_31*P_32 <= H_21*Q_2", "H_21*Q~_2 <= H_31*Q_3", "H_21*P_24 <= H_31*Q~_3",
            "H_12*Q~_1 <= H_22*Q_2", "H_22*Q~_2 <= H_32*Q_3", "H_32*P_31 <= H_12*Q_1",
            "H_32*P_32 <= H_22*Q_2", "H_12*P_13 <= H_32*Q_3", "H_12*P_14 <= H_32*Q~_3",
            "H_23*P_21 <= H_13*Q_1", "H_13*Q~_1 <= H_23*Q_2", "H_23*Q~_2 <= H_33*Q_3",
            "H_23*P_24 <= H_33*Q~_3", "H_13*P_13 <= H_33*Q_3", "H_13*P_14 <= H_33*Q~_3",
        ];
        let mut a = got.clone();
        a.sort();
        let mut b: Vec<String> = table.iter().map(|s| s.to_string()).collect();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn three_users_all_equations_pass() {
        for n in 1..=2 {
            let p = precoders(3, n, 10 + n as u64);
            let r = verify_alignment_equations(&p, DEFAULT_RANK_TOL).unwrap();
            assert_eq!((r.table_passed, r.table_total), (18, 18));
            assert_eq!((r.generator_passed, r.generator_total), (16, 16));
            assert!(r.verdicts_agree);
        }
    }

    #[test]
    fn general_source_also_passes_for_three_users() {
        let r = realization(3, 1, 6);
        let opts = PrecoderOptions {
            source: Some(GeneratorSource::General),
            ..Default::default()
        };
        let p = build_asymptotic_precoders(3, 1, &r, 2, &opts).unwrap();
        let rep = verify_alignment_equations(&p, DEFAULT_RANK_TOL).unwrap();
        assert!(rep.passed() && rep.verdicts_agree);
    }

    #[test]
    fn four_users_symbolic_alignment() {
        // Numeric checks at K=4 need M_n = 2563 slots; the exact ones are cheap.
        let p = precoders(4, 1, 1);
        assert_eq!(p.m_n, 3 + 5 * 512);
        for eq in p.alignment_equations() {
            let rhs: HashSet<Column> = p.term_columns(&eq.rhs).unwrap().into_iter().collect();
            assert!(
                p.term_columns(&eq.lhs).unwrap().iter().all(|c| rhs.contains(c)),
                "{}",
                eq.label
            );
        }
        assert_eq!(p.alignment_equations().len(), 4 * 4 * 3 + 5 * 9);
    }

    #[test]
    fn mutation_breaks_exactly_the_touched_equations() {
        let p = precoders(3, 1, 7).with_random_block(BlockId::QTilde(1), 99).unwrap();
        let r = verify_alignment_equations(&p, DEFAULT_RANK_TOL).unwrap();
        assert!(r.verdicts_agree);
        for c in &r.checks {
            let touched = c.equation.contains("Q~_1");
            assert_eq!(c.exact, !touched, "{}", c.equation);
            assert_eq!(c.numeric, !touched, "{}", c.equation);
        }
        assert_eq!(r.table_passed, 15);
        assert_eq!(r.mutated, vec!["Q~_1"]);
    }

    #[test]
    fn receiver_and_eve_ranks() {
        let p = precoders(3, 1, 8);
        let m = p.assemble_receiver_and_eve_matrices().unwrap();
        assert!(m.lambda.iter().all(|a| a.shape() == (66, 66)));
        assert_eq!(m.eve.shape(), (66, 66));
        let r = p.rank_report(DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.lambda_ranks, vec![66; 3]);
        assert!(r.interference_ranks.iter().all(|&x| x <= 64));
        assert_eq!(r.eve_rank, 66);
        assert!(r.passed);
    }

    #[test]
    fn diagonal_products_commute_bitwise() {
        let p = precoders(3, 1, 9);
        for gens in &p.generators.targets {
            for a in gens {
                for b in gens {
                    let (da, db) = (p.diagonal(a), p.diagonal(b));
                    assert_eq!(da.mul(&db).entries, db.mul(&da).entries);
                }
            }
        }
        let d = p.diagonal(&h(1, 2));
        assert_eq!(d.entries, p.realization().h_series(1, 2)[..66].to_vec());
        assert!(d.mul(&d.inv()).entries.iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn deterministic_build() {
        let r = realization(3, 1, 12);
        let a = build_asymptotic_precoders(3, 1, &r, 4, &Default::default()).unwrap();
        let b = build_asymptotic_precoders(3, 1, &r, 4, &Default::default()).unwrap();
        let ma = a.assemble_receiver_and_eve_matrices().unwrap();
        let mb = b.assemble_receiver_and_eve_matrices().unwrap();
        assert_eq!(ma, mb);
        assert_eq!(a.summary(), b.summary());
    }

    #[test]
    fn rejects_bad_requests() {
        let r = realization(3, 1, 1);
        let opts = PrecoderOptions::default();
        assert!(matches!(build_asymptotic_precoders(3, 2, &r, 1, &opts), Err(Error::Mode(_))));
        let tiny = PrecoderOptions {
            entry_budget: 1000,
            ..Default::default()
        };
        assert!(matches!(
            build_asymptotic_precoders(3, 1, &r, 1, &tiny),
            Err(Error::Capacity { .. })
        ));
        assert!(build_asymptotic_precoders(3, 0, &r, 1, &opts).is_err());
        let table = PrecoderOptions {
            source: Some(GeneratorSource::Table),
            ..Default::default()
        };
        assert!(matches!(
            build_asymptotic_precoders(4, 1, &realization(4, 1, 1), 1, &table),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn summary_counts() {
        let s = precoders(3, 1, 2).summary();
        assert_eq!(s.m_n, 66);
        assert_eq!(s.column_counts["Q_1"], 16);
        assert_eq!(s.column_counts["P~_4"], 1);
        assert_eq!(s.column_counts["Q~_3"], 16);
        assert_eq!(s.column_counts["Q~_1"], 1);
    }
}
