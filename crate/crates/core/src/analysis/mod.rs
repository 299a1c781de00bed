//! Information-theoretic measurements: Gaussian entropies, mutual
//! information and leakage slopes, exact s.d.o.f. formulas, the MAC region
//! and Monte Carlo decoding error.

pub mod entropy;
pub mod error_rate;
pub mod formulas;
pub mod slope;

pub use entropy::{
    gaussian_entropy, scheme_mutual_information, EntropyProfile, MutualInformation,
    MutualInformationProfile, SchemeInformation, SchemeRef,
};
pub use error_rate::{
    monte_carlo_error_rate, reliable_rate, ErrorRateEstimate, ErrorRateOptions,
};
pub use formulas::{
    interference_scheme_sdof, mac_sdof_region, sdof_formula, sdof_formula_full_csit,
    sdof_formula_with_csit, CsitComparison, Fraction, HalfSpace, MacRegion, SdofQuery,
};
pub use slope::{default_power_grid, fit_dof_slope, power_grid, SlopeReport};
