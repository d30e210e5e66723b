use crate::eigsolve::SpdFactor;
use crate::error::{Result, WgError};
use crate::polyspace::{ElementBasis, QuadratureRule, TRANSCENDENTAL_POINTS};
use crate::sparse::norm2;

use super::assemble::AssembledForms;
use super::space::{WgFunction, WgSpace};

/// `F_i = (f, phi_i)` for every interior basis function; edge entries are zero.
pub fn load_vector<F>(space: &WgSpace, f: F) -> Vec<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let mesh = space.mesh();
    let basis = ElementBasis::new(space.degree());
    let rule = QuadratureRule::tensor_gauss(TRANSCENDENTAL_POINTS.max(space.degree() + 1));
    let values: Vec<Vec<f64>> = rule.points.iter().map(|p| basis.eval(p[0], p[1])).collect();
    let mut rhs = vec![0.0; space.num_dofs()];
    for t in 0..mesh.num_elements() {
        let sq = mesh.element_square(t);
        let dofs = space.element_dofs(t);
        let local = &mut rhs[dofs];
        for ((p, w), phi) in rule.iter().zip(&values) {
            let [x, y] = sq.to_global(p[0], p[1]);
            let fw = f(x, y) * w * sq.area();
            for (r, v) in local.iter_mut().zip(phi) {
                *r += fw * v;
            }
        }
    }
    rhs
}

/// Solves the source problem `a_w(u_h, v) = (f, v_0)` for all `v` in the space.
pub fn solve_source<'s, F>(space: &'s WgSpace, forms: &AssembledForms, f: F) -> Result<WgFunction<'s>>
where
    F: Fn(f64, f64) -> f64,
{
    let rhs = load_vector(space, f);
    let rhs_norm = norm2(&rhs);
    if rhs_norm == 0.0 {
        return Ok(WgFunction::zeros(space));
    }
    let factor = SpdFactor::new(&forms.stiffness)?;
    let mut u = factor.solve(&rhs);
    let mut residual = residual_norm(forms, &u, &rhs);
    if residual > 1e-10 * rhs_norm {
        let r: Vec<f64> = rhs
            .iter()
            .zip(forms.stiffness.matvec(&u))
            .map(|(b, au)| b - au)
            .collect();
        for (ui, di) in u.iter_mut().zip(factor.solve(&r)) {
            *ui += di;
        }
        residual = residual_norm(forms, &u, &rhs);
    }
    if !(residual <= 1e-10 * rhs_norm) {
        return Err(WgError::SolverFailure(format!(
            "source solve residual {:.3e} exceeds tolerance",
            residual / rhs_norm
        )));
    }
    WgFunction::new(space, u)
}

fn residual_norm(forms: &AssembledForms, u: &[f64], rhs: &[f64]) -> f64 {
    let au = forms.stiffness.matvec(u);
    norm2(&au.iter().zip(rhs).map(|(a, b)| a - b).collect::<Vec<_>>())
}
