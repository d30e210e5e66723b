//! Local polynomial spaces, quadrature and `L^2` projections.

mod basis;
pub mod quadrature;

pub use basis::{EdgeBasis, ElementBasis};
pub use quadrature::{LineRule, QuadratureRule, TRANSCENDENTAL_POINTS};

use nalgebra::{DMatrix, DVector};

use crate::mesh::{Segment, Square};

/// `G_ab = (phi_a, phi_b)_T` for the scaled monomial basis of degree `degree`.
pub fn element_mass_matrix(square: &Square, degree: usize) -> DMatrix<f64> {
    let basis = ElementBasis::new(degree);
    let rule = QuadratureRule::exact_for(2 * degree);
    let n = basis.len();
    let mut g = DMatrix::zeros(n, n);
    for (p, w) in rule.iter() {
        let v = basis.eval(p[0], p[1]);
        for a in 0..n {
            for b in a..n {
                g[(a, b)] += w * v[a] * v[b];
            }
        }
    }
    g.fill_lower_triangle_with_upper_triangle();
    g * square.area()
}

/// Edge Gram matrix `<s^i, s^j>_e` for the edge basis of degree `degree`.
pub fn edge_mass_matrix(segment: &Segment, degree: usize) -> DMatrix<f64> {
    let basis = EdgeBasis::new(degree);
    let rule = LineRule::exact_for(2 * degree);
    let n = basis.len();
    let mut g = DMatrix::zeros(n, n);
    for (s, w) in rule.iter() {
        let v = basis.eval(s);
        for a in 0..n {
            for b in a..n {
                g[(a, b)] += w * v[a] * v[b];
            }
        }
    }
    g.fill_lower_triangle_with_upper_triangle();
    g * segment.length
}

fn solve_spd(gram: DMatrix<f64>, rhs: DVector<f64>) -> DVector<f64> {
    gram.cholesky()
        .expect("Gram matrix of a polynomial basis is positive definite")
        .solve(&rhs)
}

fn element_rule(degree: usize) -> QuadratureRule {
    QuadratureRule::tensor_gauss(TRANSCENDENTAL_POINTS.max(degree + 1))
}

fn edge_rule(degree: usize) -> LineRule {
    LineRule::gauss(TRANSCENDENTAL_POINTS.max(degree + 1))
}

/// Coefficients of `Q_0 f`, the `L^2(T)` projection of `f` onto `P_k(T)`.
pub fn l2_project_element<F>(f: F, square: &Square, degree: usize) -> DVector<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let basis = ElementBasis::new(degree);
    let mut rhs = DVector::zeros(basis.len());
    for (p, w) in element_rule(degree).iter() {
        let [x, y] = square.to_global(p[0], p[1]);
        let fv = f(x, y) * w;
        for (r, v) in rhs.iter_mut().zip(basis.eval(p[0], p[1])) {
            *r += fv * v;
        }
    }
    rhs *= square.area();
    solve_spd(element_mass_matrix(square, degree), rhs)
}

/// Coefficients of `Q_b f`, the `L^2(e)` projection of `f` onto `P_d(e)`.
pub fn l2_project_edge<F>(f: F, segment: &Segment, degree: usize) -> DVector<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let basis = EdgeBasis::new(degree);
    let mut rhs = DVector::zeros(basis.len());
    for (s, w) in edge_rule(degree).iter() {
        let [x, y] = segment.point(s);
        let fv = f(x, y) * w;
        for (r, v) in rhs.iter_mut().zip(basis.eval(s)) {
            *r += fv * v;
        }
    }
    rhs *= segment.length;
    solve_spd(edge_mass_matrix(segment, degree), rhs)
}

/// Evaluates an element polynomial given by `coeffs` at the physical point `(x, y)`.
pub fn eval_element(coeffs: &[f64], square: &Square, degree: usize, x: f64, y: f64) -> f64 {
    let [xi, eta] = square.to_local(x, y);
    ElementBasis::new(degree)
        .eval(xi, eta)
        .iter()
        .zip(coeffs)
        .map(|(v, c)| v * c)
        .sum()
}
