use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Result, WgError};
use crate::field::SineMode;

/// Reference value of the first clamped-plate eigenvalue on the unit square.
pub const BIHARMONIC_FIRST_EIGENVALUE: f64 = 1294.9339598;

/// One distinct exact eigenvalue with its multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactEigen {
    pub value: f64,
    pub multiplicity: usize,
    /// Laplacian mode numbers `(m, n)`, ordered by `m`; empty when no closed
    /// form is available.
    pub modes: Vec<(u32, u32)>,
}

impl ExactEigen {
    /// `L^2`-normalized generators `2 sin(m pi x) sin(n pi y)` of the eigenspace.
    pub fn generators(&self) -> Vec<SineMode> {
        self.modes.iter().map(|&(m, n)| SineMode::normalized(m, n)).collect()
    }

    pub fn biharmonic_first() -> Self {
        Self {
            value: BIHARMONIC_FIRST_EIGENVALUE,
            multiplicity: 1,
            modes: Vec::new(),
        }
    }
}

/// The first `count` distinct Laplacian eigenvalues `(m^2 + n^2) pi^2`.
pub fn exact_laplacian_spectrum(count: usize) -> Result<Vec<ExactEigen>> {
    if count == 0 {
        return Err(WgError::InvalidConfig("count must be at least 1".into()));
    }
    // With m, n <= bound every sum m^2 + n^2 <= bound^2 + 1 is enumerated.
    let mut bound = 4u64;
    loop {
        let limit = bound * bound + 1;
        let mut sums: Vec<(u64, u32, u32)> = Vec::new();
        for m in 1..=bound {
            for n in 1..=bound {
                let s = m * m + n * n;
                if s <= limit {
                    sums.push((s, m as u32, n as u32));
                }
            }
        }
        sums.sort_unstable();
        let mut out: Vec<(u64, ExactEigen)> = Vec::new();
        for (s, m, n) in sums {
            match out.last_mut() {
                Some((last, e)) if *last == s => {
                    e.multiplicity += 1;
                    e.modes.push((m, n));
                }
                _ => out.push((
                    s,
                    ExactEigen {
                        value: s as f64 * PI * PI,
                        multiplicity: 1,
                        modes: vec![(m, n)],
                    },
                )),
            }
        }
        if out.len() >= count {
            out.truncate(count);
            return Ok(out.into_iter().map(|(_, e)| e).collect());
        }
        bound *= 2;
    }
}

/// The exact eigenspace for each of the first `count` eigenvalues counted
/// with multiplicity (a double eigenvalue appears twice).
pub fn laplacian_targets(count: usize) -> Result<Vec<ExactEigen>> {
    let spectrum = exact_laplacian_spectrum(count)?;
    Ok(spectrum
        .into_iter()
        .flat_map(|e| std::iter::repeat_n(e.clone(), e.multiplicity))
        .take(count)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_values() {
        let s = exact_laplacian_spectrum(4).unwrap();
        assert!((s[0].value - 19.739208802178716).abs() < 1e-12);
        assert_eq!(s[0].multiplicity, 1);
        assert!((s[1].value - 49.34802200544679).abs() < 1e-12);
        assert_eq!(s[1].modes, vec![(1, 2), (2, 1)]);
        assert!((s[2].value - 8.0 * PI * PI).abs() < 1e-12);
        assert_eq!(s[2].multiplicity, 1);
        assert_eq!(s[3].modes, vec![(1, 3), (3, 1)]);
    }

    #[test]
    fn targets_repeat_clusters() {
        let t = laplacian_targets(6).unwrap();
        let ratios: Vec<f64> = t.iter().map(|e| e.value / (PI * PI)).collect();
        let expected = [2.0, 5.0, 5.0, 8.0, 10.0, 10.0];
        for (r, e) in ratios.iter().zip(expected) {
            assert!((r - e).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_count_rejected() {
        assert!(exact_laplacian_spectrum(0).is_err());
    }
}
