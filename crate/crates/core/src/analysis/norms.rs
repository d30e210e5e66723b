use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::eigsolve::EigenCluster;
use crate::error::{Result, WgError};
use crate::field::ScalarField;
use crate::polyspace::{l2_project_edge, EdgeBasis, ElementBasis, LineRule, QuadratureRule, TRANSCENDENTAL_POINTS};
use crate::sparse::{dot, SymCsr};
use crate::wg::{qh_project, Discretization, ProblemKind, WgSpace};

use super::exact::ExactEigen;

/// Best approximation of `target` from `span(basis)` in the `M` (semi-)inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub coeffs: Vec<f64>,
    pub distance: f64,
}

/// Least-squares fit `min_c ||sum_i c_i basis_i - target||_M`.
pub fn best_fit(m: &SymCsr, basis: &[Vec<f64>], target: &[f64]) -> Result<Fit> {
    if basis.is_empty() {
        return Err(WgError::EmptyCluster);
    }
    let mb: Vec<Vec<f64>> = basis.iter().map(|b| m.matvec(b)).collect();
    let n = basis.len();
    let gram = DMatrix::from_fn(n, n, |i, j| 0.5 * (dot(&basis[i], &mb[j]) + dot(&basis[j], &mb[i])));
    let rhs = DVector::from_fn(n, |i, _| dot(&mb[i], target));
    let coeffs = match gram.clone().cholesky() {
        Some(c) => c.solve(&rhs),
        None => gram
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| WgError::SolverFailure(e.to_string()))?,
    };
    let mut diff: Vec<f64> = target.iter().map(|t| -t).collect();
    for (b, c) in basis.iter().zip(coeffs.iter()) {
        for (d, x) in diff.iter_mut().zip(b) {
            *d += c * x;
        }
    }
    Ok(Fit {
        coeffs: coeffs.iter().copied().collect(),
        distance: m.quad_form(&diff).max(0.0).sqrt(),
    })
}

fn projected(disc: &Discretization, generators: &[&dyn ScalarField]) -> Vec<Vec<f64>> {
    generators
        .iter()
        .map(|g| qh_project(*g, &disc.space).into_coeffs())
        .collect()
}

/// `min |||Q_h u - u_h|||` over `u` in the span of the generators (any
/// combination and scale).
pub fn energy_error(disc: &Discretization, uh: &[f64], generators: &[&dyn ScalarField]) -> Result<f64> {
    check_len(disc, uh)?;
    Ok(best_fit(&disc.forms.stiffness, &projected(disc, generators), uh)?.distance)
}

/// The `b_w` analogue of [`energy_error`].
pub fn mass_error(disc: &Discretization, uh: &[f64], generators: &[&dyn ScalarField]) -> Result<f64> {
    check_len(disc, uh)?;
    Ok(best_fit(&disc.forms.mass, &projected(disc, generators), uh)?.distance)
}

fn check_len(disc: &Discretization, v: &[f64]) -> Result<()> {
    if v.len() != disc.forms.dim() {
        return Err(WgError::DimensionMismatch {
            expected: disc.forms.dim(),
            got: v.len(),
        });
    }
    Ok(())
}

/// Cluster quantities `delta`, `sigma` (eigenvalue errors) and `eta`,
/// `gamma` (eigenvector distances in the mass and energy norms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub delta: f64,
    pub sigma: f64,
    /// `None` when the eigenspace has no closed form.
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
}

pub fn eigen_diagnostics(cluster: &EigenCluster, exact: &ExactEigen, disc: &Discretization) -> Result<Diagnostics> {
    if cluster.is_empty() {
        return Err(WgError::EmptyCluster);
    }
    if cluster.len() != exact.multiplicity {
        return Err(WgError::MultiplicityMismatch {
            computed: cluster.len(),
            exact: exact.multiplicity,
        });
    }
    let errs: Vec<f64> = cluster.pairs.iter().map(|p| (exact.value - p.value).abs()).collect();
    let delta = errs.iter().copied().fold(0.0, f64::max);
    let sigma = errs.iter().copied().fold(f64::INFINITY, f64::min);
    if exact.modes.is_empty() {
        return Ok(Diagnostics {
            delta,
            sigma,
            eta: None,
            gamma: None,
        });
    }
    let gens = exact.generators();
    let refs: Vec<&dyn ScalarField> = gens.iter().map(|g| g as &dyn ScalarField).collect();
    let basis = projected(disc, &refs);
    let (mut eta, mut gamma) = (0.0f64, 0.0f64);
    for p in &cluster.pairs {
        eta = eta.max(best_fit(&disc.forms.mass, &basis, &p.vector)?.distance);
        gamma = gamma.max(best_fit(&disc.forms.stiffness, &basis, &p.vector)?.distance);
    }
    Ok(Diagnostics {
        delta,
        sigma,
        eta: Some(eta),
        gamma: Some(gamma),
    })
}

/// `||u - u_0||_{L^2}` with tensor Gauss quadrature on every element.
pub fn l2_error(space: &WgSpace, coeffs: &[f64], u: &dyn ScalarField) -> f64 {
    let mesh = space.mesh();
    let k = space.degree();
    let basis = ElementBasis::new(k);
    let rule = QuadratureRule::tensor_gauss(TRANSCENDENTAL_POINTS.max(k + 1));
    let values: Vec<Vec<f64>> = rule.points.iter().map(|p| basis.eval(p[0], p[1])).collect();
    let mut sum = 0.0;
    for t in 0..mesh.num_elements() {
        let sq = mesh.element_square(t);
        let c = &coeffs[space.element_dofs(t)];
        let mut local = 0.0;
        for ((p, w), phi) in rule.iter().zip(&values) {
            let [x, y] = sq.to_global(p[0], p[1]);
            let uh: f64 = phi.iter().zip(c).map(|(a, b)| a * b).sum();
            local += w * (u.value(x, y) - uh).powi(2);
        }
        sum += local * sq.area();
    }
    sum.sqrt()
}

fn edge_point(slot: usize, s: f64) -> (f64, f64) {
    match slot {
        0 => (s, -0.5),
        1 => (0.5, s),
        2 => (s, 0.5),
        _ => (-0.5, s),
    }
}

/// `||u - u_h||_V` for the biharmonic space: the broken `||Delta(u - u_0)||`
/// plus the unweighted (`eps = 0`) edge terms of `u - u_h`.
pub fn v_norm_error<L>(space: &WgSpace, coeffs: &[f64], u: &dyn ScalarField, laplacian: L) -> Result<f64>
where
    L: Fn(f64, f64) -> f64,
{
    if space.kind() != ProblemKind::Biharmonic {
        return Err(WgError::InvalidConfig("the V-norm is defined for the biharmonic space".into()));
    }
    if coeffs.len() != space.num_dofs() {
        return Err(WgError::DimensionMismatch {
            expected: space.num_dofs(),
            got: coeffs.len(),
        });
    }
    let mesh = space.mesh();
    let h = mesh.mesh_size();
    let k = space.degree();
    let basis = ElementBasis::new(k);
    let edge_basis = EdgeBasis::new(k - 1);
    let rule = QuadratureRule::tensor_gauss(TRANSCENDENTAL_POINTS.max(k + 1));
    let line = LineRule::gauss(TRANSCENDENTAL_POINTS.max(k + 1));
    let weights = space.unweighted_stabilizer();

    let mut bulk = 0.0;
    let mut trace = 0.0;
    let mut normal = 0.0;
    for t in 0..mesh.num_elements() {
        let sq = mesh.element_square(t);
        let c = &coeffs[space.element_dofs(t)];
        let mut local = 0.0;
        for (p, w) in rule.iter() {
            let [x, y] = sq.to_global(p[0], p[1]);
            let lap_uh: f64 = basis.laplacian(p[0], p[1]).iter().zip(c).map(|(a, b)| a * b).sum::<f64>() / (h * h);
            local += w * (laplacian(x, y) - lap_uh).powi(2);
        }
        bulk += local * sq.area();

        for (slot, inc) in mesh.incidence(t).iter().enumerate() {
            let seg = mesh.edge_segment(inc.edge);
            let ne = seg.normal();
            let ub = space.trace_dofs(inc.edge).map(|r| &coeffs[r]);
            let un = space.normal_dofs(inc.edge).map(|r| &coeffs[r]);
            // Q_b of v_0 = u - u_0 on this edge.
            let qb = l2_project_edge(
                |x, y| {
                    let [xi, eta] = sq.to_local(x, y);
                    let u0: f64 = basis.eval(xi, eta).iter().zip(c).map(|(a, b)| a * b).sum();
                    u.value(x, y) - u0
                },
                &seg,
                k - 1,
            );
            let (mut tr, mut nr) = (0.0, 0.0);
            for (s, w) in line.iter() {
                let (xi, eta) = edge_point(slot, s);
                let [x, y] = sq.to_global(xi, eta);
                let e = edge_basis.eval(s);
                let poly = |d: Option<&[f64]>| d.map_or(0.0, |d| e.iter().zip(d).map(|(a, b)| a * b).sum());
                let qbv: f64 = e.iter().zip(qb.iter()).map(|(a, b)| a * b).sum();
                // v_b = u - u_b and v_n = grad u . n_e - u_n.
                let vb = u.value(x, y) - poly(ub);
                tr += w * (qbv - vb).powi(2);
                let g0 = basis
                    .grad(xi, eta)
                    .iter()
                    .zip(c)
                    .fold([0.0, 0.0], |acc, (g, ci)| [acc[0] + g[0] * ci / h, acc[1] + g[1] * ci / h]);
                // grad v_0 . n_e - v_n = u_n - grad u_0 . n_e
                nr += w * (poly(un) - (g0[0] * ne[0] + g0[1] * ne[1])).powi(2);
            }
            trace += tr * seg.length;
            normal += nr * seg.length;
        }
    }
    Ok((bulk + weights.trace * trace + weights.normal * normal).sqrt())
}
