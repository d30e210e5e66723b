use crate::error::{Result, WgError};

/// Least-squares slope of `log e` against `log h`.
pub fn rate_fit(h: &[f64], e: &[f64]) -> Result<f64> {
    if h.len() != e.len() {
        return Err(WgError::DimensionMismatch {
            expected: h.len(),
            got: e.len(),
        });
    }
    if h.len() < 2 {
        return Err(WgError::InvalidConfig("a rate fit needs at least two points".into()));
    }
    if let Some(bad) = h.iter().chain(e).find(|v| !(**v > 0.0)) {
        return Err(WgError::NonPositive(format!("rate fit input {bad:e} is not positive")));
    }
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(WgError::InvalidConfig("mesh sizes must not all coincide".into()));
    }
    Ok(sxy / sxx)
}

/// `lambda - lambda_h >= 0` per entry.
pub fn lower_bound_check(errors: &[f64]) -> Vec<bool> {
    errors.iter().map(|e| *e >= 0.0).collect()
}
