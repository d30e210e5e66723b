//! Gauss–Legendre rules on the centred reference interval `[-1/2, 1/2]` and
//! their tensor products on `[-1/2, 1/2]^2`.

use std::f64::consts::PI;

/// Points per direction used for non-polynomial integrands (exact through
/// degree 19).
pub const TRANSCENDENTAL_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly.
    pub exact_degree: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl LineRule {
    /// `n`-point Gauss–Legendre rule on `[-1/2, 1/2]`; weights sum to 1.
    pub fn gauss(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            points: nodes.iter().map(|x| 0.5 * x).collect(),
            weights: weights.iter().map(|w| 0.5 * w).collect(),
            exact_degree: 2 * n - 1,
        }
    }

    /// Smallest Gauss rule exact for polynomials of degree `degree`.
    pub fn exact_for(degree: usize) -> Self {
        Self::gauss(degree / 2 + 1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

impl QuadratureRule {
    /// Tensor product of the `n`-point Gauss rule with itself.
    pub fn tensor_gauss(n: usize) -> Self {
        let line = LineRule::gauss(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (y, wy) in line.iter() {
            for (x, wx) in line.iter() {
                points.push([x, y]);
                weights.push(wx * wy);
            }
        }
        Self {
            points,
            weights,
            exact_degree: line.exact_degree,
        }
    }

    pub fn exact_for(degree: usize) -> Self {
        Self::tensor_gauss(degree / 2 + 1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}
