//! Turning solver output into [`StudyRow`]s and fitting convergence orders.

use std::collections::BTreeMap;

use crate::eigsolve::EigenPair;
use crate::error::Result;
use crate::field::ScalarField;
use crate::sipg::SipgResult;
use crate::wg::{Discretization, ProblemKind};

use super::exact::{laplacian_targets, ExactEigen};
use super::norms::energy_error;
use super::rates::rate_fit;
use super::{FittedOrder, StudyRow};

/// Exact reference for each of the first `count` indices, where known.
pub fn references(kind: ProblemKind, count: usize) -> Result<Vec<Option<ExactEigen>>> {
    Ok(match kind {
        ProblemKind::Laplacian => laplacian_targets(count)?.into_iter().map(Some).collect(),
        ProblemKind::Biharmonic => (0..count)
            .map(|i| (i == 0).then(ExactEigen::biharmonic_first))
            .collect(),
    })
}

fn energy_against(disc: &Discretization, exact: Option<&ExactEigen>, vector: &[f64]) -> Result<Option<f64>> {
    match exact {
        Some(e) if !e.modes.is_empty() => {
            let gens = e.generators();
            let refs: Vec<&dyn ScalarField> = gens.iter().map(|g| g as &dyn ScalarField).collect();
            energy_error(disc, vector, &refs).map(Some)
        }
        _ => Ok(None),
    }
}

fn blank_row(disc: &Discretization, index: usize) -> StudyRow {
    let space = &disc.space;
    StudyRow {
        problem: space.kind().name().to_string(),
        k: space.degree(),
        epsilon: space.epsilon(),
        coarse_level: None,
        fine_level: space.level(),
        index: index + 1,
        lambda_exact: None,
        lambda_h: None,
        lambda_tilde: None,
        err_direct: None,
        err_sipg: None,
        energy_err: None,
        lower_bound: None,
        seconds: None,
        warning: None,
    }
}

/// Rows for a direct solve on `disc`.
pub fn direct_rows(disc: &Discretization, pairs: &[EigenPair]) -> Result<Vec<StudyRow>> {
    let refs = references(disc.space.kind(), pairs.len())?;
    pairs
        .iter()
        .zip(&refs)
        .enumerate()
        .map(|(i, (pair, exact))| {
            let mut row = blank_row(disc, i);
            row.lambda_h = Some(pair.value);
            if let Some(e) = exact {
                let err = e.value - pair.value;
                row.lambda_exact = Some(e.value);
                row.err_direct = Some(err);
                row.lower_bound = Some(err >= 0.0);
            }
            row.energy_err = energy_against(disc, exact.as_ref(), &pair.vector)?;
            Ok(row)
        })
        .collect()
}

/// Rows for a two-grid run, optionally joined with direct fine-level pairs.
///
/// The energy error is measured for the normalized two-grid vector and the
/// lower-bound verdict refers to `lambda - lambda~_h`.
pub fn sipg_rows(fine: &Discretization, result: &SipgResult, direct: Option<&[EigenPair]>) -> Result<Vec<StudyRow>> {
    let refs = references(fine.space.kind(), result.targets.len())?;
    result
        .targets
        .iter()
        .zip(&refs)
        .map(|(t, exact)| {
            let mut row = blank_row(fine, t.index);
            row.coarse_level = Some(result.config.coarse_level);
            row.lambda_tilde = Some(t.rayleigh);
            row.lambda_h = direct.and_then(|d| d.get(t.index)).map(|p| p.value);
            if let Some(e) = exact {
                row.lambda_exact = Some(e.value);
                row.err_sipg = Some(e.value - t.rayleigh);
                row.err_direct = row.lambda_h.map(|l| e.value - l);
                row.lower_bound = Some(e.value - t.rayleigh >= 0.0);
            }
            row.energy_err = energy_against(fine, exact.as_ref(), &t.normalized)?;
            row.warning = t.warning.clone();
            Ok(row)
        })
        .collect()
}

/// Fits `|quantity| ~ h^p` per eigenvalue index over rows that differ in
/// the fine level. Series with fewer than two levels or a zero entry are
/// skipped.
pub fn fit_orders(rows: &[StudyRow]) -> Vec<FittedOrder> {
    type Getter = fn(&StudyRow) -> Option<f64>;
    let quantities: [(&str, Getter); 3] = [
        ("err_direct", |r| r.err_direct),
        ("err_sipg", |r| r.err_sipg),
        ("energy_err", |r| r.energy_err),
    ];
    let mut out = Vec::new();
    for (name, get) in quantities {
        let mut series: BTreeMap<(usize, Option<u32>), BTreeMap<u32, f64>> = BTreeMap::new();
        for r in rows {
            if let Some(v) = get(r) {
                series
                    .entry((r.index, r.coarse_level))
                    .or_default()
                    .insert(r.fine_level, v.abs());
            }
        }
        for ((index, _), points) in series {
            if points.len() < 2 {
                continue;
            }
            let h: Vec<f64> = points.keys().map(|l| 0.5f64.powi(*l as i32)).collect();
            let e: Vec<f64> = points.values().copied().collect();
            if let Ok(order) = rate_fit(&h, &e) {
                out.push(FittedOrder {
                    quantity: name.to_string(),
                    index,
                    order,
                });
            }
        }
    }
    out
}
