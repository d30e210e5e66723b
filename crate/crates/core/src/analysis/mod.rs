//! Reference solutions, error measures, convergence rates and study rows.

mod exact;
mod norms;
mod rates;
mod study;

pub use exact::{exact_laplacian_spectrum, laplacian_targets, ExactEigen, BIHARMONIC_FIRST_EIGENVALUE};
pub use norms::{best_fit, eigen_diagnostics, energy_error, l2_error, mass_error, v_norm_error, Diagnostics, Fit};
pub use rates::{lower_bound_check, rate_fit};
pub use study::{direct_rows, fit_orders, references, sipg_rows};

use serde::{Deserialize, Serialize};

/// One eigenvalue of one run, in the layout of the CSV/JSON output.
///
/// Indices are one-based. Optional entries are absent when the quantity
/// does not apply (no coarse level for a direct solve, no closed-form
/// eigenfunction for the biharmonic problem).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub problem: String,
    pub k: usize,
    pub epsilon: f64,
    #[serde(rename = "H_level")]
    pub coarse_level: Option<u32>,
    #[serde(rename = "h_level")]
    pub fine_level: u32,
    pub index: usize,
    pub lambda_exact: Option<f64>,
    pub lambda_h: Option<f64>,
    pub lambda_tilde: Option<f64>,
    /// `lambda - lambda_h`, signed.
    pub err_direct: Option<f64>,
    /// `lambda - lambda~_h`, signed.
    pub err_sipg: Option<f64>,
    pub energy_err: Option<f64>,
    pub lower_bound: Option<bool>,
    /// Wall-clock time of the run that produced the row, when recorded.
    pub seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// A sweep of runs plus fitted orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
    pub orders: Vec<FittedOrder>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedOrder {
    pub quantity: String,
    pub index: usize,
    pub order: f64,
}
