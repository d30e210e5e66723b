//! Weak Galerkin spaces, weak differential operators and assembly of the
//! bilinear forms `a_w` and `b_w` for the Laplacian and biharmonic problems.

mod assemble;
mod interp;
mod local;
mod source;
mod space;

pub use assemble::{assemble, assemble_stabilizer, assemble_stiffness, AssembledForms};
pub use interp::qh_project;
pub use local::{weak_gradient_local, weak_laplacian_local, LocalOperators};
pub use source::{load_vector, solve_source};
pub use space::{ElementSize, ProblemKind, StabilizerWeights, WgFunction, WgSpace, DEFAULT_EPSILON};

use crate::error::Result;

/// A space together with its assembled pencil.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub space: WgSpace,
    pub forms: AssembledForms,
}

impl Discretization {
    pub fn new(kind: ProblemKind, level: u32, degree: usize, epsilon: f64) -> Result<Self> {
        Ok(Self::from_space(WgSpace::uniform(level, kind, degree, epsilon)?))
    }

    pub fn from_space(space: WgSpace) -> Self {
        let forms = assemble(&space);
        Self { space, forms }
    }
}
