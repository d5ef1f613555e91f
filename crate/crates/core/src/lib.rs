//! Numerical solver for supremal (L∞) variational problems
//!
//! ```text
//! min { ess sup_Ω H(x, Dv(x)) : v = g on ∂Ω }
//! ```
//!
//! on bounded planar (and one-dimensional) domains, through the quasi-convex
//! conjugate `L_λ` and the Finsler pseudo-distances `d_λ` it induces.

pub mod config;
pub mod domain;
pub mod error;
pub mod finsler;
pub mod geometry;
pub mod hamiltonian;
pub mod io;
pub mod pointwise;
pub mod run;
pub mod solver;
pub mod verify;

pub use domain::{GridDomain, ScalarField, Shape};
pub use error::{Error, Result};
pub use finsler::{Direction, DistanceField, Metric};
pub use geometry::Vec2;
pub use hamiltonian::{HamiltonianKind, HamiltonianSpec, WeightField};
