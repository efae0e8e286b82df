//! gausslab: a numerical laboratory for polynomial approximation under the
//! standard Gaussian measure and for statistical-query hardness experiments.
//!
//! The crate builds up from exact-degree Gauss–Hermite quadrature and
//! normalized Hermite expansions to:
//!
//! * best L1/L2 polynomial approximation and LP dual witnesses with
//!   vanishing low-degree moments,
//! * a moment-matching distribution built by rejection sampling that agrees
//!   with the Gaussian on its first d moments yet concentrates on a periodic
//!   half-grid,
//! * families of nearly orthogonal frames hiding low-dimensional structure,
//! * planted labeled distributions, SQ/CSQ oracle simulation with an
//!   adversarial tolerance channel, and end-to-end distinguishers,
//! * Gaussian noise sensitivity estimators and the circle-symmetrization
//!   identities that relate L1 approximation error to noise sensitivity,
//! * L1/L2 polynomial regression learners with thresholding.

pub mod acceptance;
pub mod approx;
pub mod error;
pub mod frames;
pub mod gauss;
pub mod linalg;
pub mod learners;
pub mod lp;
pub mod moment_match;
pub mod noise;
pub mod rng;

pub mod hermite;
pub mod instances;
pub mod targets;
pub mod quadrature;

pub use error::{Error, Result};
