//! Vector-space alignment over fading slots.
//!
//! Each scheme stacks its slots into matrices: a receiver observes
//! `wanted * v + other * u + noise`, where `v` holds the streams it cares
//! about and `u` everything else. Alignment is a statement about column spaces
//! of these matrices.

pub mod helper;
pub mod interference;
pub mod partial;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::hcat;

pub use helper::{build_helper_fading, zero_force_decode, HelperFadingScheme};
pub use interference::{
    build_asymptotic_precoders, build_cj_generators, general_generators, precoder_dimension,
    table_generators, verify_alignment_equations, AlignmentEquation, Block, BlockId, Column,
    DiagonalChannelMatrix, EquationCheck, EquationFamily, GeneratorLists, GeneratorSource,
    PrecoderOptions, PrecoderSet, PrecoderSummary, PrecodingReport, RankReport,
    ReceiverMatrices, Term, DEFAULT_PRECODER_ENTRY_BUDGET,
};
pub use partial::{build_partial_csit_fading, PartialCsitFading};

/// What one receiver sees: the streams it wants and everything else.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub wanted: DMatrix<f64>,
    pub other: DMatrix<f64>,
}

impl Observation {
    pub fn new(wanted: DMatrix<f64>, other: DMatrix<f64>) -> Result<Self> {
        if wanted.nrows() != other.nrows() {
            return Err(Error::Dimension(format!(
                "wanted block has {} rows, other block has {}",
                wanted.nrows(),
                other.nrows()
            )));
        }
        Ok(Self { wanted, other })
    }

    pub fn dimension(&self) -> usize {
        self.wanted.nrows()
    }

    /// `[wanted other]`.
    pub fn stacked(&self) -> DMatrix<f64> {
        if self.wanted.ncols() == 0 {
            return self.other.clone();
        }
        if self.other.ncols() == 0 {
            return self.wanted.clone();
        }
        hcat(&[&self.wanted, &self.other]).expect("row counts checked at construction")
    }
}

/// Kind of a stream in a slot-stacked scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamRole {
    Message,
    Jamming,
}

/// Formats a matrix as row-major CSV with 17 significant digits.
pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::with_capacity(m.nrows() * m.ncols() * 24);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:.16e}", m[(i, j)]));
        }
        out.push('\n');
    }
    out
}
