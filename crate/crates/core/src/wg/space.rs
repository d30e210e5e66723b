use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WgError};
use crate::mesh::MeshLevel;
use crate::polyspace::ElementBasis;

/// Default stabilizer exponent shift.
pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Laplacian,
    Biharmonic,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Laplacian => "laplacian",
            ProblemKind::Biharmonic => "biharmonic",
        }
    }

    pub fn min_degree(self) -> usize {
        match self {
            ProblemKind::Laplacian => 1,
            ProblemKind::Biharmonic => 2,
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = WgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "laplacian" => Ok(ProblemKind::Laplacian),
            "biharmonic" => Ok(ProblemKind::Biharmonic),
            other => Err(WgError::InvalidConfig(format!("unknown problem kind `{other}`"))),
        }
    }
}

/// Weights multiplying the two edge penalty terms of the stabilizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizerWeights {
    pub trace: f64,
    pub normal: f64,
}

/// Which length plays the role of `h_T` in the stabilizer weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementSize {
    /// The element side `h = 2^-L`.
    #[default]
    Side,
    /// The element diameter `sqrt(2) h`.
    Diameter,
}

impl ElementSize {
    pub fn name(self) -> &'static str {
        match self {
            ElementSize::Side => "side",
            ElementSize::Diameter => "diameter",
        }
    }

    pub fn of(self, side: f64) -> f64 {
        match self {
            ElementSize::Side => side,
            ElementSize::Diameter => std::f64::consts::SQRT_2 * side,
        }
    }
}

impl std::str::FromStr for ElementSize {
    type Err = WgError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "side" => Ok(ElementSize::Side),
            "diameter" => Ok(ElementSize::Diameter),
            other => Err(WgError::InvalidConfig(format!(
                "unknown element size `{other}` (expected side or diameter)"
            ))),
        }
    }
}

/// Weak Galerkin space on a uniform mesh.
///
/// Global unknowns are laid out element blocks first (`v_0`, one block of
/// `(k+1)(k+2)/2` per element in mesh order), followed by one block per
/// interior edge holding `v_b` and, for the biharmonic problem, `v_n`.
/// Boundary edges carry no unknowns.
///
/// The element-local layout is `v_0`, then `v_b` on the bottom, right, top
/// and left edges, then (biharmonic) `v_n` in the same edge order.
#[derive(Debug, Clone)]
pub struct WgSpace {
    mesh: MeshLevel,
    kind: ProblemKind,
    degree: usize,
    epsilon: f64,
    element_size: ElementSize,
    interior_edge_slot: Vec<Option<usize>>,
    num_interior_edges: usize,
}

impl WgSpace {
    pub fn new(mesh: MeshLevel, kind: ProblemKind, degree: usize, epsilon: f64) -> Result<Self> {
        if degree < kind.min_degree() {
            return Err(WgError::DegreeTooLow {
                problem: kind.name(),
                degree,
                minimum: kind.min_degree(),
            });
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(WgError::InvalidEpsilon(epsilon));
        }
        let mut next = 0;
        let interior_edge_slot = mesh
            .edges()
            .iter()
            .map(|e| {
                (!e.boundary).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Ok(Self {
            mesh,
            kind,
            degree,
            epsilon,
            element_size: ElementSize::Side,
            interior_edge_slot,
            num_interior_edges: next,
        })
    }

    pub fn uniform(level: u32, kind: ProblemKind, degree: usize, epsilon: f64) -> Result<Self> {
        Self::new(MeshLevel::build_uniform(level)?, kind, degree, epsilon)
    }

    pub fn with_element_size(mut self, element_size: ElementSize) -> Self {
        self.element_size = element_size;
        self
    }

    pub fn element_size(&self) -> ElementSize {
        self.element_size
    }

    pub fn mesh(&self) -> &MeshLevel {
        &self.mesh
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn level(&self) -> u32 {
        self.mesh.level()
    }

    /// Unknowns per element interior block.
    pub fn element_block(&self) -> usize {
        ElementBasis::dimension(self.degree)
    }

    /// Coefficients of one edge polynomial (`P_{k-1}(e)`).
    pub fn edge_block(&self) -> usize {
        self.degree
    }

    fn edge_stride(&self) -> usize {
        match self.kind {
            ProblemKind::Laplacian => self.degree,
            ProblemKind::Biharmonic => 2 * self.degree,
        }
    }

    /// Number of `v_0` unknowns; these are the first unknowns globally.
    pub fn num_interior_dofs(&self) -> usize {
        self.mesh.num_elements() * self.element_block()
    }

    pub fn num_interior_edges(&self) -> usize {
        self.num_interior_edges
    }

    pub fn num_dofs(&self) -> usize {
        self.num_interior_dofs() + self.num_interior_edges * self.edge_stride()
    }

    pub fn element_dofs(&self, element: usize) -> Range<usize> {
        let n0 = self.element_block();
        element * n0..(element + 1) * n0
    }

    pub fn trace_dofs(&self, edge: usize) -> Option<Range<usize>> {
        self.interior_edge_slot[edge].map(|q| {
            let start = self.num_interior_dofs() + q * self.edge_stride();
            start..start + self.degree
        })
    }

    pub fn normal_dofs(&self, edge: usize) -> Option<Range<usize>> {
        if self.kind != ProblemKind::Biharmonic {
            return None;
        }
        self.interior_edge_slot[edge].map(|q| {
            let start = self.num_interior_dofs() + q * self.edge_stride() + self.degree;
            start..start + self.degree
        })
    }

    /// Length of an element-local coefficient vector.
    pub fn local_dim(&self) -> usize {
        self.element_block() + 4 * self.edge_stride()
    }

    pub fn local_trace_offset(&self, slot: usize) -> usize {
        self.element_block() + slot * self.degree
    }

    pub fn local_normal_offset(&self, slot: usize) -> usize {
        self.element_block() + 4 * self.degree + slot * self.degree
    }

    /// Global index of every local unknown; `None` on boundary edges.
    pub fn local_to_global(&self, element: usize) -> Vec<Option<usize>> {
        let mut map = Vec::with_capacity(self.local_dim());
        map.extend(self.element_dofs(element).map(Some));
        let incidence = self.mesh.incidence(element);
        for inc in incidence {
            match self.trace_dofs(inc.edge) {
                Some(r) => map.extend(r.map(Some)),
                None => map.extend(std::iter::repeat_n(None, self.degree)),
            }
        }
        if self.kind == ProblemKind::Biharmonic {
            for inc in incidence {
                match self.normal_dofs(inc.edge) {
                    Some(r) => map.extend(r.map(Some)),
                    None => map.extend(std::iter::repeat_n(None, self.degree)),
                }
            }
        }
        map
    }

    /// Element-local coefficients of a global vector; boundary entries are zero.
    pub fn gather(&self, element: usize, coeffs: &[f64]) -> Vec<f64> {
        self.local_to_global(element)
            .into_iter()
            .map(|g| g.map_or(0.0, |i| coeffs[i]))
            .collect()
    }

    /// The stabilizer weights `h^{-1+eps}` (Laplacian) or
    /// `h^{-3+eps}`, `h^{-1+eps}` (biharmonic).
    pub fn stabilizer_weights(&self) -> StabilizerWeights {
        self.weights_with_epsilon(self.epsilon)
    }

    /// Weights of the reference norm `|||.|||_1`, i.e. the stabilizer with `eps = 0`.
    pub fn unweighted_stabilizer(&self) -> StabilizerWeights {
        self.weights_with_epsilon(0.0)
    }

    fn weights_with_epsilon(&self, eps: f64) -> StabilizerWeights {
        let h = self.element_size.of(self.mesh.mesh_size());
        match self.kind {
            ProblemKind::Laplacian => StabilizerWeights {
                trace: h.powf(-1.0 + eps),
                normal: 0.0,
            },
            ProblemKind::Biharmonic => StabilizerWeights {
                trace: h.powf(-3.0 + eps),
                normal: h.powf(-1.0 + eps),
            },
        }
    }
}

/// Coefficient vector over the unknowns of a [`WgSpace`].
#[derive(Debug, Clone)]
pub struct WgFunction<'s> {
    space: &'s WgSpace,
    coeffs: Vec<f64>,
}

impl<'s> WgFunction<'s> {
    pub fn new(space: &'s WgSpace, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.num_dofs() {
            return Err(WgError::DimensionMismatch {
                expected: space.num_dofs(),
                got: coeffs.len(),
            });
        }
        Ok(Self { space, coeffs })
    }

    pub fn zeros(space: &'s WgSpace) -> Self {
        Self {
            space,
            coeffs: vec![0.0; space.num_dofs()],
        }
    }

    pub fn space(&self) -> &'s WgSpace {
        self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// `v_0` on an element.
    pub fn interior(&self, element: usize) -> &[f64] {
        &self.coeffs[self.space.element_dofs(element)]
    }

    /// `v_b` on an edge, `None` on the boundary where it vanishes.
    pub fn trace(&self, edge: usize) -> Option<&[f64]> {
        self.space.trace_dofs(edge).map(|r| &self.coeffs[r])
    }

    /// `v_n` on an edge (biharmonic only), `None` on the boundary.
    pub fn normal(&self, edge: usize) -> Option<&[f64]> {
        self.space.normal_dofs(edge).map(|r| &self.coeffs[r])
    }

    pub fn local(&self, element: usize) -> Vec<f64> {
        self.space.gather(element, &self.coeffs)
    }
}
