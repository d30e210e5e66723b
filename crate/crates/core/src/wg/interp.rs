use crate::field::ScalarField;
use crate::polyspace::{l2_project_edge, l2_project_element};

use super::space::{ProblemKind, WgFunction, WgSpace};

/// `Q_h f`: `Q_0 f` on elements, `Q_b f` on interior edges and, for the
/// biharmonic space, `Q_b (grad f . n_e)`. Boundary unknowns do not exist.
pub fn qh_project<'s>(f: &dyn ScalarField, space: &'s WgSpace) -> WgFunction<'s> {
    let mesh = space.mesh();
    let k = space.degree();
    let mut out = WgFunction::zeros(space);
    let coeffs = out.coeffs_mut();
    for t in 0..mesh.num_elements() {
        let p = l2_project_element(|x, y| f.value(x, y), &mesh.element_square(t), k);
        coeffs[space.element_dofs(t)].copy_from_slice(p.as_slice());
    }
    for e in 0..mesh.num_edges() {
        let Some(trace) = space.trace_dofs(e) else {
            continue;
        };
        let seg = mesh.edge_segment(e);
        let p = l2_project_edge(|x, y| f.value(x, y), &seg, k - 1);
        coeffs[trace].copy_from_slice(p.as_slice());
        if space.kind() == ProblemKind::Biharmonic {
            let ne = seg.normal();
            let p = l2_project_edge(
                |x, y| {
                    let g = f.gradient(x, y);
                    g[0] * ne[0] + g[1] * ne[1]
                },
                &seg,
                k - 1,
            );
            coeffs[space.normal_dofs(e).unwrap()].copy_from_slice(p.as_slice());
        }
    }
    out
}
