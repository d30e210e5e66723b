//! Uniform square partitions of the unit square.
//!
//! A level `L` mesh has `2^L x 2^L` axis-aligned square cells. All geometry
//! is kept in integer cell/vertex coordinates together with the level, so
//! containment between nested levels is decided by integer shifts.
//!
//! Every edge carries a fixed unit normal `n_e`: `+y` for horizontal edges and
//! `+x` for vertical edges. Each element sees its four edges in the order
//! bottom, right, top, left together with the sign `n . n_e` of its outward
//! normal against the edge normal.

use serde::Serialize;

use crate::error::{Result, WgError};

/// Largest level accepted by [`MeshLevel::build_uniform`].
pub const MAX_LEVEL: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeOrientation {
    /// Runs along `x`; fixed normal `+y`.
    Horizontal,
    /// Runs along `y`; fixed normal `+x`.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Element {
    pub ix: u32,
    pub iy: u32,
}

/// An edge anchored at vertex `(i, j)`; horizontal edges end at `(i+1, j)`,
/// vertical edges at `(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub orientation: EdgeOrientation,
    pub i: u32,
    pub j: u32,
    pub boundary: bool,
}

/// One entry of an element's edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Incidence {
    pub edge: usize,
    /// `n . n_e`, with `n` the element's outward normal.
    pub sign: i8,
}

/// Local edge slots of an element.
pub const BOTTOM: usize = 0;
pub const RIGHT: usize = 1;
pub const TOP: usize = 2;
pub const LEFT: usize = 3;

/// Outward unit normals in local edge order.
pub const OUTWARD_NORMALS: [[f64; 2]; 4] = [[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]];

/// Axis-aligned square described by its centre and side length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Square {
    pub center: [f64; 2],
    pub side: f64,
}

impl Square {
    /// Maps scaled local coordinates in `[-1/2, 1/2]^2` to physical space.
    pub fn to_global(&self, xi: f64, eta: f64) -> [f64; 2] {
        [self.center[0] + self.side * xi, self.center[1] + self.side * eta]
    }

    pub fn to_local(&self, x: f64, y: f64) -> [f64; 2] {
        [(x - self.center[0]) / self.side, (y - self.center[1]) / self.side]
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }
}

/// Straight edge described by its midpoint, length and orientation. The
/// edge parameter `s` runs over `[-1/2, 1/2]` along `+x` or `+y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub midpoint: [f64; 2],
    pub length: f64,
    pub orientation: EdgeOrientation,
}

impl Segment {
    pub fn point(&self, s: f64) -> [f64; 2] {
        match self.orientation {
            EdgeOrientation::Horizontal => [self.midpoint[0] + self.length * s, self.midpoint[1]],
            EdgeOrientation::Vertical => [self.midpoint[0], self.midpoint[1] + self.length * s],
        }
    }

    /// The fixed edge normal `n_e`.
    pub fn normal(&self) -> [f64; 2] {
        match self.orientation {
            EdgeOrientation::Horizontal => [0.0, 1.0],
            EdgeOrientation::Vertical => [1.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshLevel {
    level: u32,
    cells_per_side: u32,
    elements: Vec<Element>,
    edges: Vec<Edge>,
    incidence: Vec<[Incidence; 4]>,
}

impl MeshLevel {
    /// Builds the uniform `2^level x 2^level` partition of `(0,1)^2`.
    ///
    /// Elements are ordered lexicographically by `(iy, ix)`. Horizontal
    /// edges come first, ordered by `(j, i)`, followed by vertical edges
    /// ordered by `(j, i)`.
    pub fn build_uniform(level: u32) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(WgError::Capacity {
                level,
                max: MAX_LEVEL,
            });
        }
        let n = 1u32 << level;
        let nu = n as usize;

        let mut elements = Vec::with_capacity(nu * nu);
        for iy in 0..n {
            for ix in 0..n {
                elements.push(Element { ix, iy });
            }
        }

        let n_horizontal = nu * (nu + 1);
        let mut edges = Vec::with_capacity(2 * n_horizontal);
        for j in 0..=n {
            for i in 0..n {
                edges.push(Edge {
                    orientation: EdgeOrientation::Horizontal,
                    i,
                    j,
                    boundary: j == 0 || j == n,
                });
            }
        }
        for j in 0..n {
            for i in 0..=n {
                edges.push(Edge {
                    orientation: EdgeOrientation::Vertical,
                    i,
                    j,
                    boundary: i == 0 || i == n,
                });
            }
        }

        let horizontal = |i: u32, j: u32| (j as usize) * nu + i as usize;
        let vertical = |i: u32, j: u32| n_horizontal + (j as usize) * (nu + 1) + i as usize;
        let incidence = elements
            .iter()
            .map(|e| {
                [
                    Incidence {
                        edge: horizontal(e.ix, e.iy),
                        sign: -1,
                    },
                    Incidence {
                        edge: vertical(e.ix + 1, e.iy),
                        sign: 1,
                    },
                    Incidence {
                        edge: horizontal(e.ix, e.iy + 1),
                        sign: 1,
                    },
                    Incidence {
                        edge: vertical(e.ix, e.iy),
                        sign: -1,
                    },
                ]
            })
            .collect();

        Ok(Self {
            level,
            cells_per_side: n,
            elements,
            edges,
            incidence,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn cells_per_side(&self) -> u32 {
        self.cells_per_side
    }

    /// `h = 2^-level`, also the diameter parameter `h_T` of every element.
    pub fn mesh_size(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.boundary).count()
    }

    pub fn incidence(&self, element: usize) -> &[Incidence; 4] {
        &self.incidence[element]
    }

    /// Index of the element with cell coordinates `(ix, iy)`.
    pub fn element_index(&self, ix: u32, iy: u32) -> usize {
        iy as usize * self.cells_per_side as usize + ix as usize
    }

    pub fn element_square(&self, element: usize) -> Square {
        let e = self.elements[element];
        let h = self.mesh_size();
        Square {
            center: [(e.ix as f64 + 0.5) * h, (e.iy as f64 + 0.5) * h],
            side: h,
        }
    }

    pub fn edge_segment(&self, edge: usize) -> Segment {
        let e = self.edges[edge];
        let h = self.mesh_size();
        let midpoint = match e.orientation {
            EdgeOrientation::Horizontal => [(e.i as f64 + 0.5) * h, e.j as f64 * h],
            EdgeOrientation::Vertical => [e.i as f64 * h, (e.j as f64 + 0.5) * h],
        };
        Segment {
            midpoint,
            length: h,
            orientation: e.orientation,
        }
    }

    /// Elements adjacent to `edge` with their incidence signs.
    pub fn edge_neighbors(&self, edge: usize) -> Vec<(usize, i8)> {
        let e = self.edges[edge];
        let n = self.cells_per_side;
        let mut out = Vec::with_capacity(2);
        match e.orientation {
            EdgeOrientation::Horizontal => {
                if e.j > 0 {
                    out.push((self.element_index(e.i, e.j - 1), 1));
                }
                if e.j < n {
                    out.push((self.element_index(e.i, e.j), -1));
                }
            }
            EdgeOrientation::Vertical => {
                if e.i > 0 {
                    out.push((self.element_index(e.i - 1, e.j), 1));
                }
                if e.i < n {
                    out.push((self.element_index(e.i, e.j), -1));
                }
            }
        }
        out
    }
}

/// Maps every fine element to the coarse element containing it.
pub fn containment_map(coarse: &MeshLevel, fine: &MeshLevel) -> Result<Vec<usize>> {
    if fine.level < coarse.level {
        return Err(WgError::LevelOrder {
            coarse: coarse.level,
            fine: fine.level,
        });
    }
    let shift = fine.level - coarse.level;
    Ok(fine
        .elements
        .iter()
        .map(|e| coarse.element_index(e.ix >> shift, e.iy >> shift))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entity_counts() {
        for (level, elements, edges) in [(0, 1, 4), (1, 4, 12), (3, 64, 144)] {
            let mesh = MeshLevel::build_uniform(level).unwrap();
            assert_eq!(mesh.num_elements(), elements);
            assert_eq!(mesh.num_edges(), edges);
            assert_eq!(mesh.num_boundary_edges(), 4 << level);
        }
    }

    #[test]
    fn count_formulas_hold_up_to_level_six() {
        for level in 0..=6u32 {
            let mesh = MeshLevel::build_uniform(level).unwrap();
            let n = 1usize << level;
            assert_eq!(mesh.num_elements(), n * n);
            assert_eq!(mesh.num_edges(), 2 * n * (n + 1));
            assert_eq!(mesh.num_boundary_edges(), 4 * n);
        }
    }

    #[test]
    fn rejects_excessive_level() {
        assert_eq!(
            MeshLevel::build_uniform(21).unwrap_err(),
            WgError::Capacity { level: 21, max: 20 }
        );
    }

    #[test]
    fn interior_edges_have_opposite_signs() {
        let mesh = MeshLevel::build_uniform(3).unwrap();
        let mut seen = vec![Vec::new(); mesh.num_edges()];
        for t in 0..mesh.num_elements() {
            for inc in mesh.incidence(t) {
                seen[inc.edge].push(inc.sign);
            }
        }
        for (edge, signs) in seen.iter().enumerate() {
            if mesh.edges()[edge].boundary {
                assert_eq!(signs.len(), 1);
            } else {
                assert_eq!(signs.len(), 2);
                assert_eq!(signs.iter().map(|&s| s as i32).sum::<i32>(), 0);
            }
            let mut neighbors: Vec<i8> = mesh.edge_neighbors(edge).iter().map(|n| n.1).collect();
            let mut expected = signs.clone();
            neighbors.sort();
            expected.sort();
            assert_eq!(neighbors, expected);
        }
    }

    #[test]
    fn incidence_signs_match_outward_normals() {
        let mesh = MeshLevel::build_uniform(2).unwrap();
        for t in 0..mesh.num_elements() {
            let sq = mesh.element_square(t);
            for (slot, inc) in mesh.incidence(t).iter().enumerate() {
                let seg = mesh.edge_segment(inc.edge);
                let n = OUTWARD_NORMALS[slot];
                let ne = seg.normal();
                assert_eq!((n[0] * ne[0] + n[1] * ne[1]) as i8, inc.sign);
                let mid = sq.to_global(0.5 * n[0], 0.5 * n[1]);
                assert_eq!(mid, seg.midpoint);
            }
        }
    }

    #[test]
    fn containment_examples() {
        let l0 = MeshLevel::build_uniform(0).unwrap();
        let l1 = MeshLevel::build_uniform(1).unwrap();
        let l2 = MeshLevel::build_uniform(2).unwrap();
        let same = containment_map(&l2, &l2).unwrap();
        assert_eq!(same, (0..16).collect::<Vec<_>>());
        assert!(containment_map(&l0, &l2).unwrap().iter().all(|&c| c == 0));
        let map = containment_map(&l1, &l2).unwrap();
        assert_eq!(map[l2.element_index(3, 2)], l1.element_index(1, 1));
        assert_eq!(
            containment_map(&l2, &l1).unwrap_err(),
            WgError::LevelOrder { coarse: 2, fine: 1 }
        );
    }

    #[test]
    fn fine_cells_tile_coarse_cells() {
        let coarse = MeshLevel::build_uniform(2).unwrap();
        let fine = MeshLevel::build_uniform(5).unwrap();
        let map = containment_map(&coarse, &fine).unwrap();
        // Areas in units of fine cells: each coarse cell holds 4^(5-2) of them.
        let mut counts = vec![0usize; coarse.num_elements()];
        for (f, &c) in map.iter().enumerate() {
            counts[c] += 1;
            let fe = fine.elements()[f];
            let ce = coarse.elements()[c];
            assert!(fe.ix / 8 == ce.ix && fe.iy / 8 == ce.iy);
        }
        assert!(counts.iter().all(|&c| c == 64));
    }

    #[test]
    fn ordering_is_reproducible() {
        let a = MeshLevel::build_uniform(3).unwrap();
        let b = MeshLevel::build_uniform(3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.elements()[1], Element { ix: 1, iy: 0 });
        assert_eq!(a.elements()[8], Element { ix: 0, iy: 1 });
    }
}
