/// Scaled monomials `xi^a eta^b`, `a + b <= degree`, in the centred local
/// coordinates `xi = (x - x_T)/h_T`, `eta = (y - y_T)/h_T` of a square.
///
/// Ordered by total degree, then by decreasing power of `xi`:
/// `1, xi, eta, xi^2, xi eta, eta^2, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementBasis {
    degree: usize,
    exponents: Vec<(u32, u32)>,
}

impl ElementBasis {
    pub fn new(degree: usize) -> Self {
        let mut exponents = Vec::with_capacity(Self::dimension(degree));
        for total in 0..=degree as u32 {
            for b in 0..=total {
                exponents.push((total - b, b));
            }
        }
        Self { degree, exponents }
    }

    /// `(k+1)(k+2)/2`.
    pub fn dimension(degree: usize) -> usize {
        (degree + 1) * (degree + 2) / 2
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.exponents
    }

    /// Position of `xi^a eta^b` in the basis.
    pub fn index_of(&self, a: u32, b: u32) -> Option<usize> {
        self.exponents.iter().position(|&e| e == (a, b))
    }

    pub fn eval(&self, xi: f64, eta: f64) -> Vec<f64> {
        self.exponents
            .iter()
            .map(|&(a, b)| xi.powi(a as i32) * eta.powi(b as i32))
            .collect()
    }

    /// Gradients with respect to the local coordinates.
    pub fn grad(&self, xi: f64, eta: f64) -> Vec<[f64; 2]> {
        self.exponents
            .iter()
            .map(|&(a, b)| [dpow(xi, a) * eta.powi(b as i32), xi.powi(a as i32) * dpow(eta, b)])
            .collect()
    }

    /// Laplacians with respect to the local coordinates.
    pub fn laplacian(&self, xi: f64, eta: f64) -> Vec<f64> {
        self.exponents
            .iter()
            .map(|&(a, b)| d2pow(xi, a) * eta.powi(b as i32) + xi.powi(a as i32) * d2pow(eta, b))
            .collect()
    }
}

/// Scaled monomials `s^j`, `j <= degree`, in the edge parameter
/// `s in [-1/2, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeBasis {
    degree: usize,
}

impl EdgeBasis {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        (0..=self.degree as i32).map(|j| s.powi(j)).collect()
    }
}

fn dpow(x: f64, a: u32) -> f64 {
    if a == 0 {
        0.0
    } else {
        a as f64 * x.powi(a as i32 - 1)
    }
}

fn d2pow(x: f64, a: u32) -> f64 {
    if a < 2 {
        0.0
    } else {
        (a * (a - 1)) as f64 * x.powi(a as i32 - 2)
    }
}
