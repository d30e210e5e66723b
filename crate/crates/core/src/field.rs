//! Analytic scalar fields with gradients.

use std::f64::consts::PI;

pub trait ScalarField: Sync {
    fn value(&self, x: f64, y: f64) -> f64;
    fn gradient(&self, x: f64, y: f64) -> [f64; 2];
}

/// `amplitude * sin(m pi x) sin(n pi y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineMode {
    pub m: u32,
    pub n: u32,
    pub amplitude: f64,
}

impl SineMode {
    /// The `L^2((0,1)^2)`-normalised Dirichlet Laplacian eigenfunction.
    pub fn normalized(m: u32, n: u32) -> Self {
        Self { m, n, amplitude: 2.0 }
    }
}

impl ScalarField for SineMode {
    fn value(&self, x: f64, y: f64) -> f64 {
        let (a, b) = (self.m as f64 * PI, self.n as f64 * PI);
        self.amplitude * (a * x).sin() * (b * y).sin()
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let (a, b) = (self.m as f64 * PI, self.n as f64 * PI);
        [
            self.amplitude * a * (a * x).cos() * (b * y).sin(),
            self.amplitude * b * (a * x).sin() * (b * y).cos(),
        ]
    }
}

/// Polynomial in global coordinates, `sum c x^a y^b`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    pub terms: Vec<(f64, u32, u32)>,
}

impl Polynomial {
    pub fn monomial(a: u32, b: u32) -> Self {
        Self {
            terms: vec![(1.0, a, b)],
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|&(_, a, b)| a + b).max().unwrap_or(0)
    }

    pub fn laplacian(&self) -> Polynomial {
        let mut terms = Vec::new();
        for &(c, a, b) in &self.terms {
            if a >= 2 {
                terms.push((c * (a * (a - 1)) as f64, a - 2, b));
            }
            if b >= 2 {
                terms.push((c * (b * (b - 1)) as f64, a, b - 2));
            }
        }
        Polynomial { terms }
    }
}

fn pow(x: f64, a: u32) -> f64 {
    x.powi(a as i32)
}

impl ScalarField for Polynomial {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&(c, a, b)| c * pow(x, a) * pow(y, b)).sum()
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let mut g = [0.0, 0.0];
        for &(c, a, b) in &self.terms {
            if a > 0 {
                g[0] += c * a as f64 * pow(x, a - 1) * pow(y, b);
            }
            if b > 0 {
                g[1] += c * b as f64 * pow(x, a) * pow(y, b - 1);
            }
        }
        g
    }
}

/// Field built from a value closure and a gradient closure.
pub struct FnField<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<F, G> ScalarField for FnField<F, G>
where
    F: Fn(f64, f64) -> f64 + Sync,
    G: Fn(f64, f64) -> [f64; 2] + Sync,
{
    fn value(&self, x: f64, y: f64) -> f64 {
        (self.value)(x, y)
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        (self.gradient)(x, y)
    }
}

/// `x^2 (1-x)^2 y^2 (1-y)^2`, the clamped-plate bubble used for manufactured
/// biharmonic solutions.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlateBubble;

impl PlateBubble {
    fn p(t: f64) -> f64 {
        t * t * (1.0 - t) * (1.0 - t)
    }
    fn dp(t: f64) -> f64 {
        2.0 * t - 6.0 * t * t + 4.0 * t * t * t
    }
    fn d2p(t: f64) -> f64 {
        2.0 - 12.0 * t + 12.0 * t * t
    }

    pub fn laplacian(&self, x: f64, y: f64) -> f64 {
        Self::d2p(x) * Self::p(y) + Self::p(x) * Self::d2p(y)
    }

    /// `Delta^2 u`.
    pub fn bilaplacian(&self, x: f64, y: f64) -> f64 {
        24.0 * Self::p(y) + 2.0 * Self::d2p(x) * Self::d2p(y) + 24.0 * Self::p(x)
    }
}

impl ScalarField for PlateBubble {
    fn value(&self, x: f64, y: f64) -> f64 {
        Self::p(x) * Self::p(y)
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        [Self::dp(x) * Self::p(y), Self::p(x) * Self::dp(y)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradients_match_finite_differences() {
        let d = 1e-6;
        let fields: Vec<Box<dyn ScalarField>> = vec![
            Box::new(SineMode::normalized(2, 3)),
            Box::new(Polynomial {
                terms: vec![(1.5, 3, 1), (-2.0, 0, 2), (0.5, 0, 0)],
            }),
            Box::new(PlateBubble),
        ];
        for f in &fields {
            let (x, y) = (0.31, 0.62);
            let g = f.gradient(x, y);
            let gx = (f.value(x + d, y) - f.value(x - d, y)) / (2.0 * d);
            let gy = (f.value(x, y + d) - f.value(x, y - d)) / (2.0 * d);
            assert!((g[0] - gx).abs() < 1e-7 && (g[1] - gy).abs() < 1e-7);
        }
    }

    #[test]
    fn bubble_bilaplacian_matches_finite_differences() {
        let b = PlateBubble;
        let (x, y, d) = (0.37, 0.71, 1e-3);
        let lap = |x: f64, y: f64| b.laplacian(x, y);
        let fd = (lap(x + d, y) + lap(x - d, y) + lap(x, y + d) + lap(x, y - d) - 4.0 * lap(x, y))
            / (d * d);
        assert!((b.bilaplacian(x, y) - fd).abs() < 1e-4);
    }
}
