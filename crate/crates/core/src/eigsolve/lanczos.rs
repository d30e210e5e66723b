//! Block Lanczos for the smallest eigenpairs of `A x = lambda B x`.
//!
//! The iteration runs on `A^{-1} B`, which is self-adjoint in the
//! `B`-semi-inner product. `B` is singular (edge unknowns carry no mass), but
//! every vector produced by the operator lies in `range(A^{-1} B)` where the
//! seminorm is definite. Ritz vectors are purified by one more application of
//! the operator, which also removes the start block's null-space part.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Result, WgError};
use crate::sparse::{dot, norm2, SymCsr};
use crate::wg::AssembledForms;

use super::factor::SpdFactor;
use super::{fix_sign, EigenPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Relative residual `||A x - lambda B x|| / ||A x||` required for every pair.
    pub tol: f64,
    /// Vectors per Krylov block; must cover the largest multiplicity wanted.
    pub block_size: usize,
    /// Hard cap on the basis dimension (`0` selects a size-based default).
    pub max_basis: usize,
    /// Relative gap below which eigenvalues are grouped into one cluster.
    pub cluster_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            block_size: 4,
            max_basis: 0,
            cluster_tol: 1e-6,
        }
    }
}

/// Deterministic, well-spread values in `[-1, 1)` (splitmix64 of the index).
fn spread(seed: u64) -> f64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

/// Start block: all-ones on the mass-carrying unknowns, followed by
/// deterministic pseudo-random columns on the same unknowns.
fn start_block(n: usize, interior: &[usize], size: usize) -> Vec<Vec<f64>> {
    (0..size)
        .map(|c| {
            let mut v = vec![0.0; n];
            for (k, &i) in interior.iter().enumerate() {
                v[i] = if c == 0 {
                    1.0
                } else {
                    spread(((c as u64) << 40) ^ k as u64)
                };
            }
            v
        })
        .collect()
}

struct Basis<'a> {
    mass: &'a SymCsr,
    q: Vec<Vec<f64>>,
    bq: Vec<Vec<f64>>,
}

impl Basis<'_> {
    /// B-orthogonalizes `w` against the basis (twice) and appends it unless
    /// it is numerically dependent. Returns whether it was added.
    fn push(&mut self, mut w: Vec<f64>) -> bool {
        let before = self.mass.quad_form(&w).max(0.0).sqrt();
        if before == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for (q, bq) in self.q.iter().zip(&self.bq) {
                let c = dot(&w, bq);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let bw = self.mass.matvec(&w);
        let after = dot(&w, &bw).max(0.0).sqrt();
        if after <= 1e-10 * before {
            return false;
        }
        let inv = 1.0 / after;
        w.iter_mut().for_each(|x| *x *= inv);
        self.bq.push(bw.into_iter().map(|x| x * inv).collect());
        self.q.push(w);
        true
    }
}

fn combine(vectors: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; vectors[0].len()];
    for (v, &c) in vectors.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

/// The `m` smallest eigenpairs of the pencil, ascending, `B`-orthonormal.
pub fn smallest_eigs(forms: &AssembledForms, m: usize, options: &EigenOptions) -> Result<Vec<EigenPair>> {
    if m == 0 {
        return Err(WgError::InvalidConfig("at least one eigenpair must be requested".into()));
    }
    let a = &forms.stiffness;
    let b = &forms.mass;
    let n = a.dim();
    let interior: Vec<usize> = (0..n).filter(|&i| b.get(i, i) > 0.0).collect();
    let rank = interior.len();
    if m > rank {
        return Err(WgError::InvalidConfig(format!(
            "requested {m} eigenpairs but the pencil has only {rank} finite eigenvalues"
        )));
    }
    let factor = SpdFactor::new(a)?;
    let block = options.block_size.max(1);
    let cap = if options.max_basis > 0 {
        options.max_basis
    } else {
        (20 * m + 10 * block).max(120)
    }
    .min(rank);

    let mut basis = Basis {
        mass: b,
        q: Vec::new(),
        bq: Vec::new(),
    };
    for v in start_block(n, &interior, block.min(rank)) {
        basis.push(v);
    }
    // images[i] = A^{-1} B q_i
    let mut images: Vec<Vec<f64>> = Vec::new();
    let mut iterations = 0;

    loop {
        iterations += 1;
        let expanded = images.len();
        for i in expanded..basis.q.len() {
            images.push(factor.solve(&basis.bq[i]));
        }
        let dim = images.len();

        // Rayleigh–Ritz: H = Q^T B A^{-1} B Q.
        let h = DMatrix::from_fn(dim, dim, |i, j| dot(&basis.bq[i], &images[j]));
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

        let wanted = m.min(dim);
        let mut ritz = Vec::with_capacity(wanted);
        let mut worst = 0.0f64;
        for &idx in order.iter().take(wanted) {
            let theta = eig.eigenvalues[idx];
            let s: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
            let qs = combine(&basis.q[..dim], &s);
            let ws = combine(&images, &s);
            // With x = W s / theta: A x - lambda B x = -B (W s - theta Q s) / theta^2
            // and A x = B Q s / theta.
            let r: Vec<f64> = ws.iter().zip(&qs).map(|(w, q)| w - theta * q).collect();
            let res = if theta > 0.0 {
                norm2(&b.matvec(&r)) / (theta * norm2(&b.matvec(&qs)))
            } else {
                f64::INFINITY
            };
            worst = worst.max(res);
            ritz.push((theta, ws, res));
        }

        if wanted == m && worst <= options.tol {
            return finish(forms, ritz, options);
        }

        // Expand with the newest images.
        let mut added = 0;
        for image in &images[expanded..dim] {
            if basis.q.len() >= cap {
                break;
            }
            if basis.push(image.clone()) {
                added += 1;
            }
        }
        if added == 0 {
            // Either the Krylov space is invariant (Ritz pairs are then exact
            // up to rounding) or the basis cap is reached.
            if wanted == m && basis.q.len() < cap {
                return finish(forms, ritz, options);
            }
            return Err(WgError::NoConvergence {
                iterations,
                worst_residual: worst,
            });
        }
    }
}

fn finish(
    forms: &AssembledForms,
    ritz: Vec<(f64, Vec<f64>, f64)>,
    options: &EigenOptions,
) -> Result<Vec<EigenPair>> {
    let b = &forms.mass;
    let mut pairs: Vec<EigenPair> = ritz
        .into_iter()
        .map(|(theta, mut x, _)| {
            let norm = b.quad_form(&x).sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
            EigenPair {
                value: 1.0 / theta,
                vector: x,
                residual: 0.0,
            }
        })
        .collect();
    pairs.sort_by(|p, q| p.value.total_cmp(&q.value));

    // Re-orthonormalize inside numerically multiple groups.
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len()
            && (pairs[end].value - pairs[end - 1].value).abs() <= options.cluster_tol * pairs[end].value
        {
            end += 1;
        }
        for i in start..end {
            for j in start..i {
                let c = b.bilinear(&pairs[j].vector, &pairs[i].vector);
                let (head, tail) = pairs.split_at_mut(i);
                for (x, y) in tail[0].vector.iter_mut().zip(&head[j].vector) {
                    *x -= c * y;
                }
            }
            let norm = b.quad_form(&pairs[i].vector).sqrt();
            pairs[i].vector.iter_mut().for_each(|v| *v /= norm);
        }
        start = end;
    }

    let n_interior = (0..forms.dim()).filter(|&i| b.get(i, i) > 0.0).count();
    let (a_norm, b_norm) = (forms.stiffness.inf_norm(), b.inf_norm());
    let mut worst = 0.0f64;
    for p in &mut pairs {
        fix_sign(&mut p.vector, n_interior);
        let ax = forms.stiffness.matvec(&p.vector);
        let bx = b.matvec(&p.vector);
        let r: Vec<f64> = ax.iter().zip(&bx).map(|(a, m)| a - p.value * m).collect();
        let ax_norm = norm2(&ax);
        p.residual = norm2(&r) / ax_norm;
        // Strongly stabilized pencils cannot reach `tol` when the product
        // `A x` itself is dominated by cancellation.
        let floor = 64.0 * f64::EPSILON * (a_norm + p.value * b_norm) * norm2(&p.vector) / ax_norm;
        if p.residual > options.tol.max(floor) {
            worst = worst.max(p.residual);
        }
    }
    if worst > 0.0 || pairs.iter().any(|p| !p.residual.is_finite()) {
        return Err(WgError::NoConvergence {
            iterations: 0,
            worst_residual: worst,
        });
    }
    Ok(pairs)
}
