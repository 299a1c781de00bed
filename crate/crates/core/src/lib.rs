//! Secure degrees of freedom without eavesdropper channel knowledge.
//!
//! Builds the cooperative-jamming alignment schemes for the wiretap channel
//! with helpers, the multiple access wiretap channel and the interference
//! channel with an external eavesdropper, then checks them: exactly (symbolic
//! exponent arithmetic), numerically (matrix rank) and information
//! theoretically (log-det mutual information slopes, Monte Carlo decoding).

pub mod analysis;
pub mod channel;
pub mod converse;
pub mod error;
pub mod linalg;
pub mod monomial_alignment;
pub mod precoding;
pub mod seed;

pub use error::{Error, Result};
