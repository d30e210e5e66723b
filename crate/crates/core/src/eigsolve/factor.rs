//! Sparse direct factorizations of [`SymCsr`] matrices, backed by faer.

use std::sync::Once;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::perm::PermRef;
use faer::prelude::Solve;
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, CholeskySymbolicParams, IntranodeLbltRef, SymbolicCholesky, SymmetricOrdering,
};
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::sparse::linalg::SupernodalThreshold;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, MatMut, Par, Side};

use crate::error::{Result, WgError};
use crate::sparse::{norm2, SymCsr};

static SEQUENTIAL: Once = Once::new();

// Factorizations run single-threaded so that results are bitwise reproducible.
fn ensure_sequential() {
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

fn to_faer(m: &SymCsr, full: bool) -> Result<SparseColMat<usize, f64>> {
    let mut triplets = Vec::with_capacity(if full { 2 * m.nnz_upper() } else { m.nnz_upper() });
    for (r, c, v) in m.upper_entries() {
        triplets.push(Triplet::new(r, c, v));
        if full && r != c {
            triplets.push(Triplet::new(c, r, v));
        }
    }
    SparseColMat::try_new_from_triplets(m.dim(), m.dim(), &triplets)
        .map_err(|e| WgError::FactorizationFailure(format!("{e:?}")))
}

/// Sparse Cholesky factorization of a symmetric positive definite matrix.
pub struct SpdFactor {
    llt: Llt<usize, f64>,
    dim: usize,
}

impl SpdFactor {
    pub fn new(matrix: &SymCsr) -> Result<Self> {
        ensure_sequential();
        let upper = to_faer(matrix, false)?;
        let llt = upper
            .sp_cholesky(Side::Upper)
            .map_err(|e| WgError::FactorizationFailure(format!("matrix is not positive definite: {e}")))?;
        Ok(Self {
            llt,
            dim: matrix.dim(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        self.llt
            .solve_in_place(MatMut::from_column_major_slice_mut(x, self.dim, 1));
    }
}

/// Outcome of a pivoted solve together with its quality indicators.
#[derive(Debug, Clone)]
pub struct PivotedSolution {
    pub x: Vec<f64>,
    /// Normwise backward error `||M x - b|| / (||M||_inf ||x|| + ||b||)`.
    pub residual: f64,
    /// `||M||_inf ||x|| / ||b||`, a lower bound on the condition number.
    pub amplification: f64,
}

fn quality(matrix: &SymCsr, x: Vec<f64>, rhs: &[f64]) -> PivotedSolution {
    let b_norm = norm2(rhs);
    let r: Vec<f64> = rhs.iter().zip(matrix.matvec(&x)).map(|(b, mx)| b - mx).collect();
    let mx_norm = matrix.inf_norm() * norm2(&x);
    let residual = norm2(&r) / (mx_norm + b_norm);
    let amplification = mx_norm / b_norm;
    let finite = |v: f64| if v.is_finite() { v } else { f64::INFINITY };
    PivotedSolution {
        x,
        residual: finite(residual),
        amplification: finite(amplification),
    }
}

/// Solves with `solve` and one step of iterative refinement.
fn refined_solve(matrix: &SymCsr, rhs: &[f64], solve: impl Fn(&mut [f64])) -> PivotedSolution {
    if norm2(rhs) == 0.0 {
        return PivotedSolution {
            x: vec![0.0; rhs.len()],
            residual: 0.0,
            amplification: 0.0,
        };
    }
    let mut x = rhs.to_vec();
    solve(&mut x);
    let mut r: Vec<f64> = rhs.iter().zip(matrix.matvec(&x)).map(|(b, mx)| b - mx).collect();
    if norm2(&r) > 1e-14 * norm2(rhs) && r.iter().all(|v| v.is_finite()) {
        solve(&mut r);
        for (xi, di) in x.iter_mut().zip(r) {
            *xi += di;
        }
    }
    quality(matrix, x, rhs)
}

/// Sparse symmetric indefinite `L B L^T` factorization (AMD ordering,
/// Bunch–Kaufman pivoting inside supernodes).
pub struct IndefiniteFactor {
    symbolic: SymbolicCholesky<usize>,
    values: Vec<f64>,
    subdiag: Vec<f64>,
    perm_fwd: Vec<usize>,
    perm_inv: Vec<usize>,
    matrix: SymCsr,
}

impl IndefiniteFactor {
    pub fn new(matrix: SymCsr) -> Result<Self> {
        ensure_sequential();
        let n = matrix.dim();
        let upper = to_faer(&matrix, false)?;
        let fail = |e: faer::sparse::FaerError| WgError::FactorizationFailure(format!("{e:?}"));
        let symbolic = factorize_symbolic_cholesky(
            upper.symbolic(),
            Side::Upper,
            SymmetricOrdering::Amd,
            CholeskySymbolicParams {
                // The simplicial path does not pivot.
                supernodal_flop_ratio_threshold: SupernodalThreshold::FORCE_SUPERNODAL,
                ..Default::default()
            },
        )
        .map_err(fail)?;
        let mut values = vec![0.0; symbolic.len_val()];
        let mut subdiag = vec![0.0; n];
        let mut perm_fwd = vec![0usize; n];
        let mut perm_inv = vec![0usize; n];
        let mut mem = MemBuffer::try_new(
            symbolic.factorize_numeric_intranode_lblt_scratch::<f64>(Par::Seq, Default::default()),
        )
        .map_err(|e| WgError::FactorizationFailure(format!("{e:?}")))?;
        symbolic.factorize_numeric_intranode_lblt(
            &mut values,
            &mut subdiag,
            &mut perm_fwd,
            &mut perm_inv,
            upper.as_ref(),
            Side::Upper,
            Par::Seq,
            MemStack::new(&mut mem),
            Default::default(),
        );
        Ok(Self {
            symbolic,
            values,
            subdiag,
            perm_fwd,
            perm_inv,
            matrix,
        })
    }

    pub fn matrix(&self) -> &SymCsr {
        &self.matrix
    }

    fn raw_solve(&self, x: &mut [f64]) {
        let n = self.matrix.dim();
        let perm = unsafe { PermRef::new_unchecked(&self.perm_fwd, &self.perm_inv, n) };
        let lblt = IntranodeLbltRef::new(&self.symbolic, &self.values, &self.subdiag, perm);
        let mut mem = MemBuffer::new(self.symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
        lblt.solve_in_place_with_conj(
            Conj::No,
            MatMut::from_column_major_slice_mut(x, n, 1),
            Par::Seq,
            MemStack::new(&mut mem),
        );
    }

    /// Solves with one step of iterative refinement and reports the residual
    /// and amplification without judging them.
    pub fn solve(&self, rhs: &[f64]) -> PivotedSolution {
        refined_solve(&self.matrix, rhs, |x| self.raw_solve(x))
    }
}

/// Sparse LU factorization with partial pivoting of a symmetric (possibly
/// indefinite) matrix.
pub struct LuFactor {
    lu: Lu<usize, f64>,
    matrix: SymCsr,
}

impl LuFactor {
    pub fn new(matrix: SymCsr) -> Result<Self> {
        ensure_sequential();
        let full = to_faer(&matrix, true)?;
        let lu = full.sp_lu().map_err(|e| match e {
            faer::sparse::linalg::LuError::SymbolicSingular { .. } => WgError::NearSingular {
                residual: f64::INFINITY,
                amplification: f64::INFINITY,
            },
            other => WgError::FactorizationFailure(format!("{other}")),
        })?;
        Ok(Self { lu, matrix })
    }

    pub fn matrix(&self) -> &SymCsr {
        &self.matrix
    }

    fn raw_solve(&self, x: &mut [f64]) {
        let n = self.matrix.dim();
        self.lu.solve_in_place(MatMut::from_column_major_slice_mut(x, n, 1));
    }

    /// Solves with one step of iterative refinement and reports the residual
    /// and amplification without judging them.
    pub fn solve(&self, rhs: &[f64]) -> PivotedSolution {
        refined_solve(&self.matrix, rhs, |x| self.raw_solve(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize, shift: f64) -> SymCsr {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 - shift));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        SymCsr::from_upper_triplets(n, t)
    }

    #[test]
    fn cholesky_and_lu_agree_on_spd() {
        let m = laplacian_1d(50, 0.0);
        let rhs: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let x1 = SpdFactor::new(&m).unwrap().solve(&rhs);
        let sol = LuFactor::new(m.clone()).unwrap().solve(&rhs);
        assert!(sol.residual < 1e-14);
        for (a, b) in x1.iter().zip(&sol.x) {
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = laplacian_1d(10, 3.0);
        assert!(matches!(SpdFactor::new(&m), Err(WgError::FactorizationFailure(_))));
    }

    #[test]
    fn lu_handles_indefinite() {
        let m = laplacian_1d(40, 1.0);
        let rhs = vec![1.0; 40];
        let sol = LuFactor::new(m).unwrap().solve(&rhs);
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn lblt_matches_lu_on_indefinite() {
        let m = laplacian_1d(60, 1.3);
        let rhs: Vec<f64> = (0..60).map(|i| ((i * 7 % 11) as f64) - 5.0).collect();
        let a = IndefiniteFactor::new(m.clone()).unwrap().solve(&rhs);
        let b = LuFactor::new(m).unwrap().solve(&rhs);
        assert!(a.residual < 1e-15);
        for (x, y) in a.x.iter().zip(&b.x) {
            assert!((x - y).abs() < 1e-10 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn shift_on_eigenvalue_is_flagged() {
        let n = 30;
        let lambda = 2.0 - 2.0 * (3.0 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let m = laplacian_1d(n, lambda);
        let rhs = vec![1.0; n];
        let sol = IndefiniteFactor::new(m).unwrap().solve(&rhs);
        let bad = !sol.x.iter().all(|v| v.is_finite()) || sol.amplification > 1e12;
        assert!(bad, "amplification {}", sol.amplification);
    }
}
