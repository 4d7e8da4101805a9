//! Adaptive lowest-order Nédélec finite elements for the 3D H(curl) interface problem
//!
//! ```text
//! curl(μ⁻¹ curl u) + β u = f   in Ω,     u × n = g   on ∂Ω
//! ```
//!
//! with μ and β positive and piecewise constant over a subdomain partition.
//! The crate provides the mesh machinery (oriented entities, coefficient-aware
//! patches, longest-edge bisection), the ND₀/BDM₁/P1 element families, the
//! Galerkin solver, a weighted-averaging flux recovery together with the
//! recovery, residual and Zienkiewicz-Zhu indicators, the adaptive driver and
//! a few numerical checks for the structural hypotheses behind the estimator.

pub mod amr;
pub mod analysis;
pub mod assembly;
pub mod elements;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod io;
pub mod mesh;
pub mod quadrature;
pub mod recovery;

pub use error::{Error, Result};
pub use geometry::{Point3, Vec3};

#[cfg(test)]
pub(crate) mod testing;
