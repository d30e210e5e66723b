//! Generalized eigensolver for the pencil `(A, B)`, the shifted indefinite
//! solve and the Rayleigh quotient used by the two-grid scheme.

mod factor;
mod lanczos;

pub use factor::{IndefiniteFactor, LuFactor, PivotedSolution, SpdFactor};
pub use lanczos::{smallest_eigs, EigenOptions};

use serde::Serialize;

use crate::error::{Result, WgError};
use crate::sparse::norm2;
use crate::wg::AssembledForms;

/// Backward-error tolerance for the shifted solve.
pub const SHIFTED_RESIDUAL_TOL: f64 = 1e-12;
/// Amplification `||M||_inf ||x|| / ||b||` above which a shift is flagged.
pub const SHIFTED_AMPLIFICATION_LIMIT: f64 = 1e14;

/// Sparse factorization used for the indefinite shifted systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftedBackend {
    /// Symmetric `L B L^T` with Bunch–Kaufman pivoting inside supernodes.
    #[default]
    Lblt,
    /// LU with partial pivoting; much larger fill on these matrices.
    Lu,
}

impl std::str::FromStr for ShiftedBackend {
    type Err = WgError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lblt" => Ok(Self::Lblt),
            "lu" => Ok(Self::Lu),
            other => Err(WgError::InvalidConfig(format!(
                "unknown shifted solver `{other}` (expected lblt or lu)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `||A u - lambda B u|| / ||A u||`.
    pub residual: f64,
}

/// Eigenpairs whose values agree within a relative tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenCluster {
    pub pairs: Vec<EigenPair>,
    pub tolerance: f64,
}

impl EigenCluster {
    /// Splits an ascending list into clusters of consecutive values whose
    /// relative gap is at most `rel_tol`.
    pub fn group(pairs: Vec<EigenPair>, rel_tol: f64) -> Vec<EigenCluster> {
        let mut out: Vec<EigenCluster> = Vec::new();
        for p in pairs {
            match out.last_mut() {
                Some(c) if {
                    let last = c.pairs.last().unwrap().value;
                    (p.value - last).abs() <= rel_tol * p.value.abs().max(last.abs())
                } =>
                {
                    c.pairs.push(p)
                }
                _ => out.push(EigenCluster {
                    pairs: vec![p],
                    tolerance: rel_tol,
                }),
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }
}

/// Makes the largest-magnitude coefficient among the first `n_interior`
/// entries positive (first index wins ties).
pub fn fix_sign(v: &mut [f64], n_interior: usize) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in &v[..n_interior.min(v.len())] {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Factors `A - shift B` and solves, returning quality indicators.
pub fn solve_shifted_raw(forms: &AssembledForms, shift: f64, rhs: &[f64]) -> Result<PivotedSolution> {
    solve_shifted_with(forms, shift, rhs, ShiftedBackend::default())
}

pub fn solve_shifted_with(
    forms: &AssembledForms,
    shift: f64,
    rhs: &[f64],
    backend: ShiftedBackend,
) -> Result<PivotedSolution> {
    if rhs.len() != forms.dim() {
        return Err(WgError::DimensionMismatch {
            expected: forms.dim(),
            got: rhs.len(),
        });
    }
    if norm2(rhs) == 0.0 {
        return Ok(PivotedSolution {
            x: vec![0.0; rhs.len()],
            residual: 0.0,
            amplification: 0.0,
        });
    }
    let matrix = forms.stiffness.add_scaled(&forms.mass, -shift);
    Ok(match backend {
        ShiftedBackend::Lblt => IndefiniteFactor::new(matrix)?.solve(rhs),
        ShiftedBackend::Lu => LuFactor::new(matrix)?.solve(rhs),
    })
}

/// Whether a pivoted solution passes the accuracy checks.
pub fn is_acceptable(sol: &PivotedSolution) -> bool {
    sol.x.iter().all(|x| x.is_finite())
        && sol.residual <= SHIFTED_RESIDUAL_TOL
        && sol.amplification <= SHIFTED_AMPLIFICATION_LIMIT
}

/// Solves `(A - shift B) x = rhs`.
pub fn solve_shifted(forms: &AssembledForms, shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let sol = solve_shifted_raw(forms, shift, rhs)?;
    if !is_acceptable(&sol) {
        return Err(WgError::NearSingular {
            residual: sol.residual,
            amplification: sol.amplification,
        });
    }
    Ok(sol.x)
}

/// `x^T A x / x^T B x`.
pub fn rayleigh_quotient(forms: &AssembledForms, x: &[f64]) -> Result<f64> {
    if x.len() != forms.dim() {
        return Err(WgError::DimensionMismatch {
            expected: forms.dim(),
            got: x.len(),
        });
    }
    let bxx = forms.mass.quad_form(x);
    if !(bxx > 1e-300) {
        return Err(WgError::ZeroMass);
    }
    Ok(forms.stiffness.quad_form(x) / bxx)
}
