//! Measurement-dependent local deterministic models for the singlet state.
//!
//! A one-parameter family (indexed by γ > −1/2) of hidden-variable densities
//! that depend on the detector settings and reproduce the singlet correlation
//! E(x, y) = −cos φ exactly. The crate solves each member's normalizing
//! coefficients, checks the correlation by quadrature and by Monte Carlo,
//! and measures how strongly the densities depend on the settings through
//! the L1 distance between them.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlation;
pub mod distance;
pub mod error;
pub mod model;
pub mod numerics;
pub mod report;

pub use error::{Error, Result};
