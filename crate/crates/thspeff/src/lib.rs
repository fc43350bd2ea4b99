// `!(x > 0.0)` is used throughout to validate inputs: unlike `x <= 0.0` it
// also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Spectral efficiency of randomly spread CDMA with time-hopping and
//! direct-sequence signatures: ensemble sampling, empirical spectra,
//! closed-form receiver capacities, and a Monte Carlo harness.

pub mod capacity;
pub mod ensembles;
pub mod error;
pub mod figures;
pub mod laws;
pub mod linalg;
pub mod montecarlo;
pub mod output;
pub mod quad;
pub mod receivers;
pub mod spectra;
pub mod validate;

pub use error::{Error, Result};
