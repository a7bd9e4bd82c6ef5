//! Time-harmonic acoustic scattering by clusters of small bubbles with high
//! density contrast.
//!
//! The point-interaction (Foldy-Lax) model replaces each bubble by a
//! monopole whose strength solves a dense `M x M` system; the crate also
//! computes the shape functionals entering the scattering coefficients and
//! carries two reference solvers (partial waves for one sphere, a boundary
//! integral solver for a few spheres) used to measure the model error.

pub mod boundary_ops;
pub mod error;
pub mod fields;
pub mod foldy_lax;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod numerics;
pub mod oracle;
pub mod parallel;
pub mod physics;
pub mod shape_functionals;

pub use error::{Error, Result};
pub use numerics::{Vec3, C64};
