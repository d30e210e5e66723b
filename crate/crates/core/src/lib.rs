//! Weak Galerkin eigenvalue solvers for the Laplacian and biharmonic
//! problems on the unit square, with a two-grid shifted-inverse-power
//! accelerator and convergence-study helpers.

pub mod analysis;
pub mod eigsolve;
pub mod error;
pub mod field;
pub mod mesh;
pub mod polyspace;
pub mod sipg;
pub mod sparse;
pub mod wg;

pub use error::{Result, WgError};
