//! Exact symbolic machinery for the fixed-gain alignment schemes.
//!
//! Dimensions are monomials over channel gains and random constants. Distinct
//! monomials are rationally independent almost surely, so alignment and
//! separability questions become exact questions about integer exponents.

pub mod dimension;
pub mod interference;
pub mod monomial;
pub mod pam;

pub use dimension::{DimensionSet, Relation};
pub use interference::{
    beta, build_interference_t_sets, build_interference_ttilde_sets, m_s_formula,
    verify_interference_alignment, AlignmentCheck, AlignmentOptions, AlignmentReport, BetaRule,
    CheckStatus, ClaimKind,
};
pub use monomial::{Gen, Monomial, Valuation};
pub use pam::{
    build_helper_scheme, build_partial_csit_fixed, decode_nearest_point, encode_pam,
    gain_values, khintchine_groshev_bound, pam_levels, receive_noiseless, select_pam_params,
    DecodedSymbols, NearestPointDecoder, PamLayout, PamParams, PamScheme, Stream, StreamKind,
    DEFAULT_DECODE_BUDGET,
};
