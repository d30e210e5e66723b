//! Oracles and helpers shared by the integration tests. Apart from
//! `local_projection`, nothing here calls into the library's quadrature,
//! projection or eigensolver code.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use wgeig::field::ScalarField;
use wgeig::polyspace::{l2_project_edge, l2_project_element, ElementBasis};
use wgeig::wg::{AssembledForms, ProblemKind, WgSpace};

/// Gauss–Legendre nodes and weights on `[-1/2, 1/2]` by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * x, 0.5 * w));
    }
    out
}

/// Tensor rule on `[-1/2, 1/2]^2`.
pub fn tensor_rule(n: usize) -> Vec<([f64; 2], f64)> {
    let g = gauss_legendre(n);
    let mut out = Vec::with_capacity(n * n);
    for &(x, wx) in &g {
        for &(y, wy) in &g {
            out.push(([x, y], wx * wy));
        }
    }
    out
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].powi(2))
            .sum();
        let scale: f64 = (0..n).map(|i| a[(i, i)].powi(2)).sum();
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Solves `M X = R` for symmetric positive definite `M` by unpivoted
/// Gaussian elimination.
pub fn spd_solve(m: &DMatrix<f64>, r: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    let mut x = r.clone();
    for k in 0..n {
        for i in k + 1..n {
            let f = a[(i, k)] / a[(k, k)];
            for j in k..n {
                a[(i, j)] -= f * a[(k, j)];
            }
            for j in 0..x.ncols() {
                x[(i, j)] -= f * x[(k, j)];
            }
        }
    }
    for k in (0..n).rev() {
        for j in 0..x.ncols() {
            let mut s = x[(k, j)];
            for c in k + 1..n {
                s -= a[(k, c)] * x[(c, j)];
            }
            x[(k, j)] = s / a[(k, k)];
        }
    }
    x
}

/// Pencil eigenvalues of `(A, B)` with edge unknowns condensed out:
/// `S = A_00 - A_0b A_bb^{-1} A_b0`, then `B_00^{-1/2} S B_00^{-1/2}` by Jacobi.
pub fn dense_pencil_eigenvalues(space: &WgSpace, forms: &AssembledForms) -> Vec<f64> {
    let a = forms.stiffness.to_dense();
    let b = forms.mass.to_dense();
    let n0 = space.num_interior_dofs();
    let n = a.nrows();
    let nb = n - n0;
    let a00 = a.view((0, 0), (n0, n0)).into_owned();
    let a0b = a.view((0, n0), (n0, nb)).into_owned();
    let abb = a.view((n0, n0), (nb, nb)).into_owned();
    let s = if nb > 0 {
        &a00 - &a0b * spd_solve(&abb, &a0b.transpose())
    } else {
        a00
    };
    let b00 = b.view((0, 0), (n0, n0)).into_owned();
    // B_00 = L L^T; C = L^{-1} S L^{-T}.
    let l = cholesky_lower(&b00);
    let linv = lower_inverse(&l);
    let c = &linv * s * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    jacobi_eigenvalues(c)
}

fn cholesky_lower(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        assert!(d > 0.0, "matrix is not positive definite");
        l[(j, j)] = d.sqrt();
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / l[(j, j)];
        }
    }
    l
}

fn lower_inverse(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut inv = DMatrix::zeros(n, n);
    for c in 0..n {
        for i in 0..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[(i, k)] * inv[(k, c)];
            }
            inv[(i, c)] = s / l[(i, i)];
        }
    }
    inv
}

/// Deterministic pseudo-random vector in `[-1, 1)`.
pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn poly_eval(coeffs: &[f64], degree: usize, xi: f64, eta: f64) -> f64 {
    ElementBasis::new(degree).eval(xi, eta).iter().zip(coeffs).map(|(a, b)| a * b).sum()
}

pub fn monomial_dx(a: u32, b: u32, x: f64, y: f64) -> f64 {
    if a == 0 {
        0.0
    } else {
        a as f64 * x.powi(a as i32 - 1) * y.powi(b as i32)
    }
}

pub fn monomial_lap(a: u32, b: u32, x: f64, y: f64) -> f64 {
    let d2 = |p: u32, t: f64| if p < 2 { 0.0 } else { (p * (p - 1)) as f64 * t.powi(p as i32 - 2) };
    d2(a, x) * y.powi(b as i32) + x.powi(a as i32) * d2(b, y)
}

/// Local `Q_h f` on element `t`, including edges on the boundary.
pub fn local_projection(space: &WgSpace, t: usize, f: &dyn ScalarField) -> Vec<f64> {
    let mesh = space.mesh();
    let k = space.degree();
    let sq = mesh.element_square(t);
    let mut local = vec![0.0; space.local_dim()];
    let n0 = ElementBasis::dimension(k);
    local[..n0].copy_from_slice(l2_project_element(|x, y| f.value(x, y), &sq, k).as_slice());
    for (slot, inc) in mesh.incidence(t).iter().enumerate() {
        let seg = mesh.edge_segment(inc.edge);
        let off = space.local_trace_offset(slot);
        local[off..off + k].copy_from_slice(l2_project_edge(|x, y| f.value(x, y), &seg, k - 1).as_slice());
        if space.kind() == ProblemKind::Biharmonic {
            let ne = seg.normal();
            let p = l2_project_edge(
                |x, y| {
                    let g = f.gradient(x, y);
                    g[0] * ne[0] + g[1] * ne[1]
                },
                &seg,
                k - 1,
            );
            let off = space.local_normal_offset(slot);
            local[off..off + k].copy_from_slice(p.as_slice());
        }
    }
    local
}
