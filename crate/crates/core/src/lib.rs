//! Conformally covariant operators, spectral invariants and minimal
//! representation branching on spheres and cones.

pub mod conformal_lab;
pub mod error;
pub mod flat_model;
pub mod minrep;
pub mod poly;
pub mod quad;
pub mod specfun;
pub mod spectra;
pub mod sphere;
pub mod zeta_heat;

pub use error::{Error, Result};
