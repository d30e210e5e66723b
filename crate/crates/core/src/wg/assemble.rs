use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::sparse::SymCsr;

use super::local::LocalOperators;
use super::space::{StabilizerWeights, WgSpace};

/// The pencil `(A, B)`: `A` from `a_w`, `B` from `b_w(v, w) = (v_0, w_0)`.
#[derive(Debug, Clone)]
pub struct AssembledForms {
    pub stiffness: SymCsr,
    pub mass: SymCsr,
}

impl AssembledForms {
    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }

    /// `a_w(v, v)`.
    pub fn energy(&self, v: &[f64]) -> f64 {
        self.stiffness.quad_form(v)
    }

    /// `b_w(v, v)`.
    pub fn mass_norm_sq(&self, v: &[f64]) -> f64 {
        self.mass.quad_form(v)
    }
}

pub fn assemble(space: &WgSpace) -> AssembledForms {
    let ops = reference_operators(space);
    AssembledForms {
        stiffness: scatter(space, &ops.stiffness(space.stabilizer_weights())),
        mass: scatter_mass(space, &ops.mass),
    }
}

/// `A` with arbitrary stabilizer weights (e.g. the unweighted reference norm).
pub fn assemble_stiffness(space: &WgSpace, weights: StabilizerWeights) -> SymCsr {
    let ops = reference_operators(space);
    scatter(space, &ops.stiffness(weights))
}

/// Stabilizer matrix `s(., .)` alone.
pub fn assemble_stabilizer(space: &WgSpace) -> SymCsr {
    let ops = reference_operators(space);
    scatter(space, &ops.stabilizer(space.stabilizer_weights()))
}

// Elements of a uniform mesh are translates of one another with identical
// incidence signs, and the local matrices are translation invariant in the
// centred basis.
fn reference_operators(space: &WgSpace) -> LocalOperators {
    let mesh = space.mesh();
    let signs = mesh.incidence(0).map(|inc| inc.sign);
    debug_assert!((0..mesh.num_elements()).all(|t| mesh.incidence(t).map(|i| i.sign) == signs));
    LocalOperators::for_element(space, 0)
}

fn scatter(space: &WgSpace, local: &DMatrix<f64>) -> SymCsr {
    let n = space.mesh().num_elements();
    let blocks: Vec<Vec<(usize, usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|t| {
            let map = space.local_to_global(t);
            let mut out = Vec::with_capacity(map.len() * map.len() / 2);
            for (a, ga) in map.iter().enumerate() {
                let Some(ga) = *ga else { continue };
                for (b, gb) in map.iter().enumerate() {
                    let Some(gb) = *gb else { continue };
                    if ga <= gb {
                        let v = local[(a, b)];
                        if v != 0.0 {
                            out.push((ga, gb, v));
                        }
                    }
                }
            }
            out
        })
        .collect();
    SymCsr::from_upper_triplets(space.num_dofs(), blocks.into_iter().flatten().collect())
}

fn scatter_mass(space: &WgSpace, mass: &DMatrix<f64>) -> SymCsr {
    let n0 = space.element_block();
    let mut triplets = Vec::with_capacity(space.mesh().num_elements() * n0 * (n0 + 1) / 2);
    for t in 0..space.mesh().num_elements() {
        let base = space.element_dofs(t).start;
        for a in 0..n0 {
            for b in a..n0 {
                let v = mass[(a, b)];
                if v != 0.0 {
                    triplets.push((base + a, base + b, v));
                }
            }
        }
    }
    SymCsr::from_upper_triplets(space.num_dofs(), triplets)
}
