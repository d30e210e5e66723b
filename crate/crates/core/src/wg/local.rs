//! Element-local weak operators, stabilizer blocks and mass matrices.
//!
//! All quantities are computed in the centred scaled basis of the element,
//! so they depend only on the element size and the incidence signs and not
//! on the element position.

use nalgebra::{DMatrix, DVector};

use crate::mesh::{Square, OUTWARD_NORMALS};
use crate::polyspace::{EdgeBasis, ElementBasis, LineRule, QuadratureRule};

use super::space::{ProblemKind, StabilizerWeights, WgSpace};

/// Local coordinates of the point with edge parameter `s` on local edge `slot`.
fn edge_point(slot: usize, s: f64) -> (f64, f64) {
    match slot {
        0 => (s, -0.5),
        1 => (0.5, s),
        2 => (s, 0.5),
        3 => (-0.5, s),
        _ => unreachable!("squares have four edges"),
    }
}

#[derive(Debug, Clone)]
pub struct LocalOperators {
    kind: ProblemKind,
    degree: usize,
    /// Gram matrix of the weak operator's range (`[P_{k-1}]^2` or `P_{k-2}`).
    pub weak_gram: DMatrix<f64>,
    /// Right-hand side of the defining identity of the weak operator.
    pub weak_rhs: DMatrix<f64>,
    /// Maps local unknowns to coefficients of `grad_w v` / `Delta_w v`.
    pub weak_op: DMatrix<f64>,
    /// `(grad_w v, grad_w w)_T` or `(Delta_w v, Delta_w w)_T`.
    pub consistency: DMatrix<f64>,
    /// Unweighted `sum_e <Q_b v_0 - v_b, Q_b w_0 - w_b>_e`.
    pub trace_jump: DMatrix<f64>,
    /// Unweighted `sum_e <grad v_0 . n_e - v_n, grad w_0 . n_e - w_n>_e`
    /// (zero for the Laplacian).
    pub normal_jump: DMatrix<f64>,
    /// `(v_0, w_0)_T`.
    pub mass: DMatrix<f64>,
}

impl LocalOperators {
    pub fn for_element(space: &WgSpace, element: usize) -> Self {
        let signs = space.mesh().incidence(element).map(|inc| inc.sign);
        Self::new(space, &space.mesh().element_square(element), signs)
    }

    pub fn new(space: &WgSpace, square: &Square, signs: [i8; 4]) -> Self {
        let k = space.degree();
        let h = square.side;
        let basis = ElementBasis::new(k);
        let n0 = basis.len();
        let nl = space.local_dim();
        let edge_basis = EdgeBasis::new(k - 1);
        let cell_rule = QuadratureRule::exact_for(2 * k);
        let line_rule = LineRule::exact_for(2 * k);

        let mass = crate::polyspace::element_mass_matrix(square, k);

        let (weak_gram, weak_rhs) = match space.kind() {
            ProblemKind::Laplacian => {
                let qbasis = ElementBasis::new(k - 1);
                let m1 = qbasis.len();
                let scalar_gram = crate::polyspace::element_mass_matrix(square, k - 1);
                let mut gram = DMatrix::zeros(2 * m1, 2 * m1);
                gram.view_mut((0, 0), (m1, m1)).copy_from(&scalar_gram);
                gram.view_mut((m1, m1), (m1, m1)).copy_from(&scalar_gram);

                // (grad_w v, q) = -(v_0, div q) + <v_b, q.n>
                let mut rhs = DMatrix::zeros(2 * m1, nl);
                for (p, w) in cell_rule.iter() {
                    let phi = basis.eval(p[0], p[1]);
                    let dq = qbasis.grad(p[0], p[1]);
                    for b in 0..m1 {
                        for a in 0..n0 {
                            rhs[(b, a)] -= h * w * phi[a] * dq[b][0];
                            rhs[(m1 + b, a)] -= h * w * phi[a] * dq[b][1];
                        }
                    }
                }
                for slot in 0..4 {
                    let n = OUTWARD_NORMALS[slot];
                    let off = space.local_trace_offset(slot);
                    for (s, w) in line_rule.iter() {
                        let (xi, eta) = edge_point(slot, s);
                        let q = qbasis.eval(xi, eta);
                        let e = edge_basis.eval(s);
                        for b in 0..m1 {
                            for j in 0..k {
                                rhs[(b, off + j)] += h * w * e[j] * q[b] * n[0];
                                rhs[(m1 + b, off + j)] += h * w * e[j] * q[b] * n[1];
                            }
                        }
                    }
                }
                (gram, rhs)
            }
            ProblemKind::Biharmonic => {
                let pbasis = ElementBasis::new(k - 2);
                let m2 = pbasis.len();
                let gram = crate::polyspace::element_mass_matrix(square, k - 2);

                // (Delta_w v, phi) = (v_0, Delta phi) - <v_b, grad phi . n> + <v_n (n_e . n), phi>
                let mut rhs = DMatrix::zeros(m2, nl);
                for (p, w) in cell_rule.iter() {
                    let phi = basis.eval(p[0], p[1]);
                    let lap = pbasis.laplacian(p[0], p[1]);
                    for b in 0..m2 {
                        for a in 0..n0 {
                            rhs[(b, a)] += w * phi[a] * lap[b];
                        }
                    }
                }
                for slot in 0..4 {
                    let n = OUTWARD_NORMALS[slot];
                    let sign = signs[slot] as f64;
                    let tr = space.local_trace_offset(slot);
                    let nm = space.local_normal_offset(slot);
                    for (s, w) in line_rule.iter() {
                        let (xi, eta) = edge_point(slot, s);
                        let q = pbasis.eval(xi, eta);
                        let dq = pbasis.grad(xi, eta);
                        let e = edge_basis.eval(s);
                        for b in 0..m2 {
                            let dqn = dq[b][0] * n[0] + dq[b][1] * n[1];
                            for j in 0..k {
                                rhs[(b, tr + j)] -= w * e[j] * dqn;
                                rhs[(b, nm + j)] += sign * h * w * e[j] * q[b];
                            }
                        }
                    }
                }
                (gram, rhs)
            }
        };

        let chol = weak_gram
            .clone()
            .cholesky()
            .expect("weak operator Gram matrix is positive definite");
        let weak_op = chol.solve(&weak_rhs);
        let consistency = symmetrize(weak_rhs.transpose() * &weak_op);

        // Edge blocks shared by both stabilizer terms.
        let edge_gram = edge_gram(&edge_basis, &line_rule, h);
        let edge_chol = edge_gram
            .clone()
            .cholesky()
            .expect("edge Gram matrix is positive definite");

        let mut trace_jump = DMatrix::zeros(nl, nl);
        let mut normal_jump = DMatrix::zeros(nl, nl);
        for slot in 0..4 {
            // Q_b v_0 on this edge.
            let mut moments = DMatrix::zeros(k, n0);
            for (s, w) in line_rule.iter() {
                let (xi, eta) = edge_point(slot, s);
                let phi = basis.eval(xi, eta);
                let e = edge_basis.eval(s);
                for j in 0..k {
                    for a in 0..n0 {
                        moments[(j, a)] += h * w * e[j] * phi[a];
                    }
                }
            }
            let proj = edge_chol.solve(&moments);
            let mut jump = DMatrix::zeros(k, nl);
            jump.view_mut((0, 0), (k, n0)).copy_from(&proj);
            let tr = space.local_trace_offset(slot);
            for j in 0..k {
                jump[(j, tr + j)] = -1.0;
            }
            trace_jump += jump.transpose() * &edge_gram * &jump;

            if space.kind() == ProblemKind::Biharmonic {
                // grad v_0 . n_e is a polynomial of degree k-1 on the edge; the
                // projection below reproduces it exactly.
                let sign = signs[slot] as f64;
                let ne = [sign * OUTWARD_NORMALS[slot][0], sign * OUTWARD_NORMALS[slot][1]];
                let mut moments = DMatrix::zeros(k, n0);
                for (s, w) in line_rule.iter() {
                    let (xi, eta) = edge_point(slot, s);
                    let g = basis.grad(xi, eta);
                    let e = edge_basis.eval(s);
                    for j in 0..k {
                        for a in 0..n0 {
                            moments[(j, a)] += w * e[j] * (g[a][0] * ne[0] + g[a][1] * ne[1]);
                        }
                    }
                }
                let proj = edge_chol.solve(&moments);
                let mut jump = DMatrix::zeros(k, nl);
                jump.view_mut((0, 0), (k, n0)).copy_from(&proj);
                let nm = space.local_normal_offset(slot);
                for j in 0..k {
                    jump[(j, nm + j)] = -1.0;
                }
                normal_jump += jump.transpose() * &edge_gram * &jump;
            }
        }

        Self {
            kind: space.kind(),
            degree: k,
            weak_gram,
            weak_rhs,
            weak_op,
            consistency,
            trace_jump: symmetrize(trace_jump),
            normal_jump: symmetrize(normal_jump),
            mass,
        }
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Local matrix of `(weak op, weak op) + weighted stabilizer`.
    pub fn stiffness(&self, weights: StabilizerWeights) -> DMatrix<f64> {
        let mut a = self.consistency.clone();
        a += &self.trace_jump * weights.trace;
        if self.kind == ProblemKind::Biharmonic {
            a += &self.normal_jump * weights.normal;
        }
        symmetrize(a)
    }

    pub fn stabilizer(&self, weights: StabilizerWeights) -> DMatrix<f64> {
        let mut s = &self.trace_jump * weights.trace;
        if self.kind == ProblemKind::Biharmonic {
            s += &self.normal_jump * weights.normal;
        }
        s
    }

    /// Coefficients of `grad_w v` (x-block then y-block) or `Delta_w v`.
    pub fn apply_weak(&self, local: &[f64]) -> DVector<f64> {
        &self.weak_op * DVector::from_column_slice(local)
    }
}

fn edge_gram(basis: &EdgeBasis, rule: &LineRule, length: f64) -> DMatrix<f64> {
    let n = basis.len();
    let mut g = DMatrix::zeros(n, n);
    for (s, w) in rule.iter() {
        let e = basis.eval(s);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] += length * w * e[i] * e[j];
            }
        }
    }
    g
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Weak gradient of local unknowns on `element`: coefficients of the `x`
/// component followed by the `y` component in the basis of `P_{k-1}(T)`.
pub fn weak_gradient_local(space: &WgSpace, element: usize, local: &[f64]) -> DVector<f64> {
    assert_eq!(space.kind(), ProblemKind::Laplacian, "weak gradient needs a Laplacian space");
    LocalOperators::for_element(space, element).apply_weak(local)
}

/// Weak Laplacian of local unknowns on `element` in the basis of `P_{k-2}(T)`.
pub fn weak_laplacian_local(space: &WgSpace, element: usize, local: &[f64]) -> DVector<f64> {
    assert_eq!(space.kind(), ProblemKind::Biharmonic, "weak Laplacian needs a biharmonic space");
    LocalOperators::for_element(space, element).apply_weak(local)
}
