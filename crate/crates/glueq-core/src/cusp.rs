//! Cell decompositions of the boundary surface, peripheral curves, and the
//! maps connecting them to the J-complex.
//!
//! Three decompositions of `∂M` are built from the truncated tetrahedra:
//!
//! * **standard** — the cut-off link triangles `T^i` with long edges `E^{ijk}`
//!   (from `V^{ij}` to `V^{ik}`) and corner vertices `V^{ij}`; a genuine
//!   cellulation of `∂M`, used for homology coordinates;
//! * **pentagon** — the same triangles subdivided by midpoint vertices
//!   `v^{ij}` (on the face opposite `j`) with transversal edges `e^{ij}`
//!   (cutting the corner at `V^{ij}`), faces `τ^i` and one polygon per corner
//!   class;
//! * **hexagon** — the doubly truncated picture with vertices `v^{ijk}`,
//!   corner edges `γ^{ijk}` (from `v^{ijk}` to `v^{ijl}`) and face edges
//!   `β^{ijk}` (from `v^{ijk}` to `v^{ikj}`). The `β` edges are kept
//!   per-tetrahedron (not identified across face pairings): the two sides of
//!   a face pairing carry equation data that agrees only modulo the face
//!   relations, so chains are stored at label level.
//!
//! Peripheral curves are closed sequences of corner-cutting segments; the
//! module converts them to 1-chains in each decomposition, computes the
//! intersection pairing `ι`, the maps `δ` (pentagon ⊗ ℤ^{n−1} → J),
//! `δ′` (hexagon ⊗ ℤ^{n−1} → J), `γ` (J → standard ⊗ ℤ^{n−1}), and the
//! boundary equation rows `(A^∂ | B^∂ | ε^∂)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::gluing::{cpow, EquationBlock, GluingError, ShapeAssignment, C64};
use crate::homology::{HomologyError, QuotientCoords};
use crate::jcomplex::JBasis;
use crate::lattice::{self, LatticeError, Point};
use crate::matrix::{smith_normal_form, IntMatrix, MatrixError};
use crate::perm::{self, arrangement_sign};
use crate::triangulation::{BoundaryProfile, Triangulation};

/// Errors for boundary cellulations and peripheral curves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CuspError {
    /// The triangulation has no ideal (genus ≥ 1) boundary component.
    ClosedManifold,
    /// A segment has repeated indices or indices out of range.
    BadSegment { index: usize },
    /// Consecutive segments are not connected through the face pairings.
    BrokenLink { index: usize },
    /// A curve must have at least one segment.
    EmptyCurve,
    /// The produced chain does not close up.
    NotClosed,
    /// The two chains live on different boundary components.
    ComponentMismatch,
    /// An identified cell came back orientation-reversed.
    NonOrientableCell,
    /// The spanning-tree cycles do not realize a basis of the component.
    CurveBasisUnrealizable,
    /// The level index `r` is outside `1..=n−1`.
    InvalidLevel,
    Lattice(LatticeError),
    Matrix(MatrixError),
    Homology(HomologyError),
}

impl From<LatticeError> for CuspError {
    fn from(e: LatticeError) -> Self {
        CuspError::Lattice(e)
    }
}

impl From<MatrixError> for CuspError {
    fn from(e: MatrixError) -> Self {
        CuspError::Matrix(e)
    }
}

impl From<HomologyError> for CuspError {
    fn from(e: HomologyError) -> Self {
        CuspError::Homology(e)
    }
}

// ---------------------------------------------------------------------------
// Small helpers.

/// Position of `j` among `{0,1,2,3} ∖ {i}` in increasing order (0, 1 or 2).
fn pos3(i: u8, j: u8) -> usize {
    debug_assert!(i != j);
    if j < i {
        j as usize
    } else {
        j as usize - 1
    }
}

/// The two indices other than `i` and `j`, in increasing order.
fn complement2(i: u8, j: u8) -> (u8, u8) {
    let mut out = [0u8; 2];
    let mut k = 0;
    for x in 0..4u8 {
        if x != i && x != j {
            out[k] = x;
            k += 1;
        }
    }
    (out[0], out[1])
}

/// The index other than `i`, `j`, `k`.
fn remaining(i: u8, j: u8, k: u8) -> u8 {
    (0..4u8).find(|&x| x != i && x != j && x != k).expect("three distinct labels")
}

/// The rotational sign of the ordered triple `(i,j,k)`: the sign of the
/// permutation taking `(i,j,k,l)` to `(0,1,2,3)`, `l` the remaining index.
fn rot_sign(i: u8, j: u8, k: u8) -> i64 {
    arrangement_sign(i, j, k, remaining(i, j, k))
}

/// Union-find with a ±1 sign relative to the representative, for identifying
/// oriented cells. `union(a, b, s)` records `a ≡ s·b`.
struct SignedUf {
    parent: Vec<usize>,
    sign: Vec<i64>,
}

impl SignedUf {
    fn new(n: usize) -> Self {
        SignedUf {
            parent: (0..n).collect(),
            sign: vec![1; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, i64) {
        if self.parent[x] == x {
            return (x, 1);
        }
        let (root, s) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.sign[x] *= s;
        (root, self.sign[x])
    }

    /// Records `a ≡ rel·b`. Returns `false` on an orientation conflict.
    fn union(&mut self, a: usize, b: usize, rel: i64) -> bool {
        let (ra, sa) = self.find(a);
        let (rb, sb) = self.find(b);
        if ra == rb {
            return sa == rel * sb;
        }
        // ra = (sa) a = sa·rel·b = sa·rel·sb·rb
        self.parent[ra] = rb;
        self.sign[ra] = sa * rel * sb;
        true
    }
}

// ---------------------------------------------------------------------------
// Corner cycles (shared by all three decompositions).

/// One corner of a link triangle: the corner of `T^i_Δ` at `V^{ij}`, with its
/// canonical entry/exit faces. The exit face `k` is the one with
/// `(i,j,k,l)` an even arrangement; this choice is preserved by the (odd)
/// face pairings, so walking corner-to-corner traverses the polygon around
/// the corner class coherently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    pub tet: usize,
    pub i: u8,
    pub j: u8,
    pub enter: u8,
    pub exit: u8,
}

/// The cycles of corners around each corner class `V^{ij}`, in traversal
/// order. One cycle per 0-cell of the standard decomposition.
pub fn corner_cycles(tri: &Triangulation) -> Vec<Vec<Corner>> {
    let t = tri.tet_count();
    let mut seen = BTreeSet::new();
    let mut cycles = Vec::new();
    for tet in 0..t {
        for i in 0..4u8 {
            for j in 0..4u8 {
                if j == i || seen.contains(&(tet, i, j)) {
                    continue;
                }
                let mut cycle = Vec::new();
                let (mut ct, mut ci, mut cj) = (tet, i, j);
                loop {
                    let (a, b) = complement2(ci, cj);
                    let (exit, enter) = if arrangement_sign(ci, cj, a, b) == 1 {
                        (a, b)
                    } else {
                        (b, a)
                    };
                    seen.insert((ct, ci, cj));
                    cycle.push(Corner {
                        tet: ct,
                        i: ci,
                        j: cj,
                        enter,
                        exit,
                    });
                    let g = tri.gluing(ct, exit);
                    ct = g.neighbor;
                    let p = g.perm;
                    ci = p[ci as usize];
                    cj = p[cj as usize];
                    if (ct, ci, cj) == (tet, i, j) {
                        break;
                    }
                }
                cycles.push(cycle);
            }
        }
    }
    cycles
}

// ---------------------------------------------------------------------------
// Standard decomposition.

/// The standard cellulation of `∂M`: triangles `T^i`, long-edge classes
/// `E^{ijk}` and corner classes `V^{ij}`.
#[derive(Debug, Clone)]
pub struct StandardCells {
    /// Corner classes, each the corner cycle around one 0-cell.
    pub vertices: Vec<Vec<(usize, u8, u8)>>,
    vertex_index: BTreeMap<(usize, u8, u8), usize>,
    /// Long-edge classes: the two labels `(tet, i, j, k)` aligned with the
    /// class orientation (one per truncated tetrahedron containing the edge).
    pub edges: Vec<Vec<(usize, u8, u8, u8)>>,
    edge_index: BTreeMap<(usize, u8, u8, u8), (usize, i64)>,
    /// Edge boundary map (rows: corner classes, cols: edge classes).
    pub d1: IntMatrix,
    /// Triangle boundary map (rows: edge classes, cols: triangles `4Δ+i`).
    pub d2: IntMatrix,
    /// Boundary component (vertex class of the triangulation) per triangle.
    pub component: Vec<usize>,
}

impl StandardCells {
    /// Index and orientation sign of the oriented label `E^{ijk}_Δ`.
    pub fn edge_lookup(&self, tet: usize, i: u8, j: u8, k: u8) -> (usize, i64) {
        self.edge_index[&(tet, i, j, k)]
    }

    /// Index of the corner class of `V^{ij}_Δ`.
    pub fn vertex_lookup(&self, tet: usize, i: u8, j: u8) -> usize {
        self.vertex_index[&(tet, i, j)]
    }

    fn new(tri: &Triangulation, cycles: &[Vec<Corner>]) -> Result<StandardCells, CuspError> {
        let t = tri.tet_count();

        // Corner classes from the corner cycles.
        let mut vertex_index = BTreeMap::new();
        let mut vertices = Vec::new();
        for cycle in cycles {
            let members: Vec<(usize, u8, u8)> = cycle.iter().map(|c| (c.tet, c.i, c.j)).collect();
            for &m in &members {
                vertex_index.insert(m, vertices.len());
            }
            vertices.push(members);
        }

        // Long-edge classes: identify oriented labels (tet, i, j, k) under
        // reversal (sign −1) and the face pairing through the face {i,j,k}.
        let id = |tet: usize, i: u8, j: u8, k: u8| ((tet * 4 + i as usize) * 4 + j as usize) * 4 + k as usize;
        let mut uf = SignedUf::new(64 * t);
        let mut labels = Vec::new();
        for tet in 0..t {
            for i in 0..4u8 {
                for j in 0..4u8 {
                    for k in 0..4u8 {
                        if i == j || i == k || j == k {
                            continue;
                        }
                        labels.push((tet, i, j, k));
                        if !uf.union(id(tet, i, j, k), id(tet, i, k, j), -1) {
                            return Err(CuspError::NonOrientableCell);
                        }
                        let l = remaining(i, j, k);
                        let g = tri.gluing(tet, l);
                        let p = g.perm;
                        let glued = id(g.neighbor, p[i as usize], p[j as usize], p[k as usize]);
                        if !uf.union(id(tet, i, j, k), glued, 1) {
                            return Err(CuspError::NonOrientableCell);
                        }
                    }
                }
            }
        }
        // Canonical representative: the valid label of smallest id, with
        // sign +1; all other labels carry their sign relative to it.
        let mut root_to_class: BTreeMap<usize, usize> = BTreeMap::new();
        let mut canon_sign: Vec<i64> = Vec::new();
        let mut edges: Vec<Vec<(usize, u8, u8, u8)>> = Vec::new();
        let mut edge_index = BTreeMap::new();
        for &(tet, i, j, k) in &labels {
            let (root, s) = uf.find(id(tet, i, j, k));
            let cls = *root_to_class.entry(root).or_insert_with(|| {
                canon_sign.push(s);
                edges.push(Vec::new());
                edges.len() - 1
            });
            let rel = s * canon_sign[cls];
            edge_index.insert((tet, i, j, k), (cls, rel));
            if rel == 1 {
                edges[cls].push((tet, i, j, k));
            }
        }

        // Boundary maps. ∂E^{ijk} = V^{ik} − V^{ij}; ∂T^i is the cycle
        // E^{ijk} + E^{ikl} + E^{ilj} with (i,j,k,l) odd, the orientation for
        // which γ carries the vertex relation (s,ε₀₁)+(s,ε₁₂)+(s,ε₀₂) to
        // ∂(Σᵢ T^i ⊗ v_{s,i}).
        let mut d1 = IntMatrix::zero(vertices.len(), edges.len());
        for (cls, members) in edges.iter().enumerate() {
            let (tet, i, j, k) = members[0];
            d1.add_to(vertex_index[&(tet, i, k)], cls, 1);
            d1.add_to(vertex_index[&(tet, i, j)], cls, -1);
        }
        let mut d2 = IntMatrix::zero(edges.len(), 4 * t);
        for tet in 0..t {
            for i in 0..4u8 {
                let col = 4 * tet + i as usize;
                let mut rest: Vec<u8> = (0..4u8).filter(|&x| x != i).collect();
                if arrangement_sign(i, rest[0], rest[1], rest[2]) != -1 {
                    rest.swap(1, 2);
                }
                let (p, q, r) = (rest[0], rest[1], rest[2]);
                for (x, y) in [(p, q), (q, r), (r, p)] {
                    let (cls, s) = edge_index[&(tet, i, x, y)];
                    d2.add_to(cls, col, s);
                }
            }
        }

        let cells = tri.cell_classes();
        let mut component = vec![0usize; 4 * t];
        for (vc, members) in cells.vertices.iter().enumerate() {
            for &(tet, i) in members {
                component[4 * tet + i as usize] = vc;
            }
        }

        Ok(StandardCells {
            vertices,
            vertex_index,
            edges,
            edge_index,
            d1,
            d2,
            component,
        })
    }
}

// ---------------------------------------------------------------------------
// Pentagon decomposition.

/// The pentagon cellulation: midpoint vertices `v^{ij}` (paired through the
/// face opposite `j`), transversal edges `e^{ij}` (12 per tetrahedron, no
/// identifications), faces `τ^i` and one polygon per corner class.
#[derive(Debug, Clone)]
pub struct PentagonCells {
    /// Midpoint vertex classes (pairs of labels `(tet, i, j)`).
    pub vertices: Vec<Vec<(usize, u8, u8)>>,
    vertex_index: BTreeMap<(usize, u8, u8), usize>,
    /// Number of 1-cells: `12·t`, indexed by [`PentagonCells::e_index`].
    pub edge_count: usize,
    /// Edge boundary map (rows: vertex classes, cols: edges `e^{ij}`).
    pub d1: IntMatrix,
    /// Face boundary map (rows: edges; cols: `4t` triangles `τ^i` followed by
    /// the polygons, in corner-cycle order).
    pub d2: IntMatrix,
}

impl PentagonCells {
    /// Index of the 1-cell `e^{ij}_Δ`.
    pub fn e_index(&self, tet: usize, i: u8, j: u8) -> usize {
        tet * 12 + i as usize * 3 + pos3(i, j)
    }

    /// Index of the vertex class of `v^{ij}_Δ`.
    pub fn vertex_lookup(&self, tet: usize, i: u8, j: u8) -> usize {
        self.vertex_index[&(tet, i, j)]
    }

    fn new(tri: &Triangulation, cycles: &[Vec<Corner>]) -> PentagonCells {
        let t = tri.tet_count();
        // Vertex pairs through the face opposite j.
        let mut vertex_index = BTreeMap::new();
        let mut vertices = Vec::new();
        for tet in 0..t {
            for i in 0..4u8 {
                for j in 0..4u8 {
                    if j == i || vertex_index.contains_key(&(tet, i, j)) {
                        continue;
                    }
                    let g = tri.gluing(tet, j);
                    let p = g.perm;
                    let partner = (g.neighbor, p[i as usize], p[j as usize]);
                    let cls = vertices.len();
                    vertex_index.insert((tet, i, j), cls);
                    vertex_index.insert(partner, cls);
                    vertices.push(vec![(tet, i, j), partner]);
                }
            }
        }

        let e_index = |tet: usize, i: u8, j: u8| tet * 12 + i as usize * 3 + pos3(i, j);
        // ∂e^{ij} = v^{ik} − v^{il} with (i,j,k,l) even: the tail sits on the
        // entry (odd) face, the head on the exit (even) face, so polygon
        // boundaries telescope in corner-cycle order.
        let mut d1 = IntMatrix::zero(vertices.len(), 12 * t);
        for tet in 0..t {
            for i in 0..4u8 {
                for j in 0..4u8 {
                    if j == i {
                        continue;
                    }
                    let (a, b) = complement2(i, j);
                    let (k, l) = if arrangement_sign(i, j, a, b) == 1 { (a, b) } else { (b, a) };
                    let col = e_index(tet, i, j);
                    d1.add_to(vertex_index[&(tet, i, k)], col, 1);
                    d1.add_to(vertex_index[&(tet, i, l)], col, -1);
                }
            }
        }

        let mut d2 = IntMatrix::zero(12 * t, 4 * t + cycles.len());
        for tet in 0..t {
            for i in 0..4u8 {
                let col = 4 * tet + i as usize;
                for j in 0..4u8 {
                    if j != i {
                        d2.add_to(e_index(tet, i, j), col, 1);
                    }
                }
            }
        }
        for (c, cycle) in cycles.iter().enumerate() {
            for corner in cycle {
                d2.add_to(e_index(corner.tet, corner.i, corner.j), 4 * t + c, 1);
            }
        }

        PentagonCells {
            vertices,
            vertex_index,
            edge_count: 12 * t,
            d1,
            d2,
        }
    }
}

// ---------------------------------------------------------------------------
// Hexagon decomposition.

/// The hexagon cellulation at label level. Corner edges `γ^{ijk}` (12 per
/// tetrahedron, with `γ^{ijl} = −γ^{ijk}`) and face edges `β^{ijk}` (12 per
/// tetrahedron, with `β^{ikj} = −β^{ijk}`, *not* identified across faces —
/// see the module documentation). Vertices `v^{ijk}` are paired through the
/// face `{i,j,k}`.
#[derive(Debug, Clone)]
pub struct HexagonCells {
    /// Vertex classes (pairs of labels `(tet, i, j, k)`).
    pub vertices: Vec<Vec<(usize, u8, u8, u8)>>,
    vertex_index: BTreeMap<(usize, u8, u8, u8), usize>,
    /// Canonical labels of the γ cells (cells `0..12t`).
    pub gamma_cells: Vec<(usize, u8, u8, u8)>,
    /// Canonical labels of the β cells (cells `12t..24t`).
    pub beta_cells: Vec<(usize, u8, u8, u8)>,
    gamma_index: BTreeMap<(usize, u8, u8, u8), (usize, i64)>,
    beta_index: BTreeMap<(usize, u8, u8, u8), (usize, i64)>,
    /// Total number of 1-cells (`24t`): γ cells first, then β cells.
    pub edge_count: usize,
    /// Edge boundary map (rows: vertex classes; cols: γ then β cells).
    pub d1: IntMatrix,
    /// Face boundary map (rows: edges; cols: `4t` hexagons `τ^i`, then the
    /// polygons in corner-cycle order).
    pub d2: IntMatrix,
}

impl HexagonCells {
    /// Index and sign of the oriented label `γ^{ijk}_Δ`.
    pub fn gamma_lookup(&self, tet: usize, i: u8, j: u8, k: u8) -> (usize, i64) {
        self.gamma_index[&(tet, i, j, k)]
    }

    /// Index and sign of the oriented label `β^{ijk}_Δ`.
    pub fn beta_lookup(&self, tet: usize, i: u8, j: u8, k: u8) -> (usize, i64) {
        self.beta_index[&(tet, i, j, k)]
    }

    /// Index of the vertex class of `v^{ijk}_Δ`.
    pub fn vertex_lookup(&self, tet: usize, i: u8, j: u8, k: u8) -> usize {
        self.vertex_index[&(tet, i, j, k)]
    }

    fn new(tri: &Triangulation, cycles: &[Vec<Corner>]) -> HexagonCells {
        let t = tri.tet_count();

        // Vertices: v^{ijk} pairs with v^{σi σj σk} through the face {i,j,k}.
        let mut vertex_index = BTreeMap::new();
        let mut vertices = Vec::new();
        for tet in 0..t {
            for i in 0..4u8 {
                for j in 0..4u8 {
                    for k in 0..4u8 {
                        if i == j || i == k || j == k || vertex_index.contains_key(&(tet, i, j, k)) {
                            continue;
                        }
                        let l = remaining(i, j, k);
                        let g = tri.gluing(tet, l);
                        let p = g.perm;
                        let partner = (g.neighbor, p[i as usize], p[j as usize], p[k as usize]);
                        let cls = vertices.len();
                        vertex_index.insert((tet, i, j, k), cls);
                        vertex_index.insert(partner, cls);
                        vertices.push(vec![(tet, i, j, k), partner]);
                    }
                }
            }
        }

        // γ cells: canonical third index is the smaller of the two choices.
        let mut gamma_cells = Vec::new();
        let mut gamma_index = BTreeMap::new();
        let mut beta_cells = Vec::new();
        let mut beta_index = BTreeMap::new();
        for tet in 0..t {
            for i in 0..4u8 {
                for j in 0..4u8 {
                    if j == i {
                        continue;
                    }
                    let (a, b) = complement2(i, j);
                    let cell = gamma_cells.len();
                    gamma_cells.push((tet, i, j, a));
                    gamma_index.insert((tet, i, j, a), (cell, 1));
                    gamma_index.insert((tet, i, j, b), (cell, -1));
                }
                // β cells: canonical label has j < k.
                let rest: Vec<u8> = (0..4u8).filter(|&x| x != i).collect();
                for (j, k) in [(rest[0], rest[1]), (rest[0], rest[2]), (rest[1], rest[2])] {
                    let cell = 12 * t + beta_cells.len();
                    beta_cells.push((tet, i, j, k));
                    beta_index.insert((tet, i, j, k), (cell, 1));
                    beta_index.insert((tet, i, k, j), (cell, -1));
                }
            }
        }

        // ∂γ^{ijk} = v^{ijl} − v^{ijk}; ∂β^{ijk} = v^{ikj} − v^{ijk}.
        let mut d1 = IntMatrix::zero(vertices.len(), 24 * t);
        for (cell, &(tet, i, j, k)) in gamma_cells.iter().enumerate() {
            let l = remaining(i, j, k);
            d1.add_to(vertex_index[&(tet, i, j, l)], cell, 1);
            d1.add_to(vertex_index[&(tet, i, j, k)], cell, -1);
        }
        for (b, &(tet, i, j, k)) in beta_cells.iter().enumerate() {
            let cell = 12 * t + b;
            d1.add_to(vertex_index[&(tet, i, k, j)], cell, 1);
            d1.add_to(vertex_index[&(tet, i, j, k)], cell, -1);
        }

        // Hexagon boundary: β^{ijk} γ^{ikj} β^{ikl} γ^{ilk} β^{ilj} γ^{ijl},
        // (i,j,k,l) even. Polygon boundary: one γ per corner, entering on the
        // corner's entry face and leaving on its exit face.
        let mut d2 = IntMatrix::zero(24 * t, 4 * t + cycles.len());
        for tet in 0..t {
            for i in 0..4u8 {
                let col = 4 * tet + i as usize;
                let mut rest: Vec<u8> = (0..4u8).filter(|&x| x != i).collect();
                if arrangement_sign(i, rest[0], rest[1], rest[2]) != 1 {
                    rest.swap(1, 2);
                }
                let (j, k, l) = (rest[0], rest[1], rest[2]);
                for (x, y) in [(j, k), (k, l), (l, j)] {
                    let (cell, s) = beta_index[&(tet, i, x, y)];
                    d2.add_to(cell, col, s);
                    let (cell, s) = gamma_index[&(tet, i, y, x)];
                    d2.add_to(cell, col, s);
                }
            }
        }
        for (c, cycle) in cycles.iter().enumerate() {
            for corner in cycle {
                let (cell, s) = gamma_index[&(corner.tet, corner.i, corner.j, corner.exit)];
                d2.add_to(cell, 4 * t + c, s);
            }
        }

        HexagonCells {
            vertices,
            vertex_index,
            gamma_cells,
            beta_cells,
            gamma_index,
            beta_index,
            edge_count: 24 * t,
            d1,
            d2,
        }
    }
}

// ---------------------------------------------------------------------------
// The combined boundary surface.

/// The boundary surface `∂M` with all three cell decompositions.
#[derive(Debug, Clone)]
pub struct CuspSurface {
    pub standard: StandardCells,
    pub pentagon: PentagonCells,
    pub hexagon: HexagonCells,
    /// Corner cycles (one per polygon / standard 0-cell), shared by the
    /// pentagon and hexagon polygon faces.
    pub corner_cycles: Vec<Vec<Corner>>,
    pub profile: BoundaryProfile,
}

impl CuspSurface {
    /// Builds the three decompositions. Errors with
    /// [`CuspError::ClosedManifold`] if no component has genus ≥ 1.
    pub fn new(tri: &Triangulation) -> Result<CuspSurface, CuspError> {
        let profile = tri.boundary_profile().map_err(|_| CuspError::NonOrientableCell)?;
        if profile.c == 0 {
            return Err(CuspError::ClosedManifold);
        }
        let cycles = corner_cycles(tri);
        let standard = StandardCells::new(tri, &cycles)?;
        let pentagon = PentagonCells::new(tri, &cycles);
        let hexagon = HexagonCells::new(tri, &cycles);
        Ok(CuspSurface {
            standard,
            pentagon,
            hexagon,
            corner_cycles: cycles,
            profile,
        })
    }
}

// ---------------------------------------------------------------------------
// Peripheral curves.

/// One corner-cutting segment: the curve passes through the link triangle
/// `T^vertex_Δ`, entering on the side in the face opposite `enter` and
/// leaving on the side in the face opposite `exit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveSegment {
    pub tet: usize,
    pub vertex: u8,
    pub enter: u8,
    pub exit: u8,
}

impl CurveSegment {
    /// The corner the segment cuts: the fourth index.
    pub fn corner(&self) -> u8 {
        remaining(self.vertex, self.enter, self.exit)
    }
}

/// A closed peripheral curve as a cyclic sequence of segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCurve {
    pub segments: Vec<CurveSegment>,
}

impl BoundaryCurve {
    /// Checks index ranges, `vertex ∉ {enter, exit}`, `enter ≠ exit`, and
    /// that consecutive segments (cyclically) connect through face pairings.
    pub fn validate(&self, tri: &Triangulation) -> Result<(), CuspError> {
        if self.segments.is_empty() {
            return Err(CuspError::EmptyCurve);
        }
        let m = self.segments.len();
        for (idx, s) in self.segments.iter().enumerate() {
            let distinct = s.vertex < 4
                && s.enter < 4
                && s.exit < 4
                && s.vertex != s.enter
                && s.vertex != s.exit
                && s.enter != s.exit;
            if s.tet >= tri.tet_count() || !distinct {
                return Err(CuspError::BadSegment { index: idx });
            }
            let g = tri.gluing(s.tet, s.exit);
            let p = g.perm;
            let next = &self.segments[(idx + 1) % m];
            if next.tet != g.neighbor
                || next.vertex != p[s.vertex as usize]
                || next.enter != p[s.exit as usize]
            {
                return Err(CuspError::BrokenLink { index: idx });
            }
        }
        Ok(())
    }

    /// The curve traversed backwards.
    pub fn reversed(&self) -> BoundaryCurve {
        BoundaryCurve {
            segments: self
                .segments
                .iter()
                .rev()
                .map(|s| CurveSegment {
                    tet: s.tet,
                    vertex: s.vertex,
                    enter: s.exit,
                    exit: s.enter,
                })
                .collect(),
        }
    }

    /// The boundary component (triangulation vertex class) the curve lies on.
    pub fn component(&self, surf: &CuspSurface) -> usize {
        let s = &self.segments[0];
        surf.standard.component[4 * s.tet + s.vertex as usize]
    }
}

/// The pentagon 1-chain of a curve: each segment contributes `±e^{ic}`,
/// oriented from the entry-side midpoint to the exit-side midpoint.
pub fn pentagon_chain(surf: &CuspSurface, curve: &BoundaryCurve) -> Vec<BigInt> {
    let mut chain = vec![BigInt::zero(); surf.pentagon.edge_count];
    for s in &curve.segments {
        let c = s.corner();
        // ∂e^{ic} = v^{ik} − v^{il} with (i,c,k,l) odd; the segment runs
        // tail → head when the head v^{ik} sits on the entry face (k = enter).
        let sign = arrangement_sign(s.vertex, c, s.enter, s.exit);
        let col = surf.pentagon.e_index(s.tet, s.vertex, c);
        chain[col] += sign;
    }
    chain
}

/// The hexagon 1-chain of a curve: a left pass contributes one `γ` edge, a
/// right pass the concatenation `β γ β`. The walk tracks which of the two
/// hexagon vertices on the entry face the curve is at; both starting choices
/// are tried and the one that closes up is used.
pub fn hexagon_chain(surf: &CuspSurface, curve: &BoundaryCurve, tri: &Triangulation) -> Result<Vec<BigInt>, CuspError> {
    'start: for near_first in [true, false] {
        let mut chain = vec![BigInt::zero(); surf.hexagon.edge_count];
        let s0 = &curve.segments[0];
        let c0 = s0.corner();
        let start = if near_first {
            (s0.vertex, c0, s0.exit)
        } else {
            (s0.vertex, s0.exit, c0)
        };
        let mut state = start;
        for s in &curve.segments {
            let (i, a, b, c) = (s.vertex, s.enter, s.exit, s.corner());
            let exit_vertex;
            if state == (i, c, b) {
                // Near pass: one corner edge.
                let (cell, sg) = surf.hexagon.gamma_lookup(s.tet, i, c, b);
                chain[cell] += sg;
                exit_vertex = (i, c, a);
            } else if state == (i, b, c) {
                // Far pass: across the entry face, around the corner, and
                // along the exit face.
                let (cell, sg) = surf.hexagon.beta_lookup(s.tet, i, c, b);
                chain[cell] -= sg;
                let (cell, sg) = surf.hexagon.gamma_lookup(s.tet, i, c, b);
                chain[cell] += sg;
                let (cell, sg) = surf.hexagon.beta_lookup(s.tet, i, c, a);
                chain[cell] += sg;
                exit_vertex = (i, a, c);
            } else {
                continue 'start;
            }
            let g = tri.gluing(s.tet, b);
            let p = g.perm;
            state = (
                p[exit_vertex.0 as usize],
                p[exit_vertex.1 as usize],
                p[exit_vertex.2 as usize],
            );
        }
        if state == start {
            return Ok(chain);
        }
    }
    Err(CuspError::NotClosed)
}

/// A homologous 1-chain of the curve in the standard decomposition: every
/// crossing point is slid to the head of its long edge, and consecutive
/// heads are joined along the triangle boundary `V^{ij} → V^{ik} → V^{il}`.
pub fn standard_chain(surf: &CuspSurface, curve: &BoundaryCurve) -> Vec<BigInt> {
    let std = &surf.standard;
    let mut chain = vec![BigInt::zero(); std.edges.len()];
    // Local head of the long edge of T^i in the face opposite `a`: the end
    // the class orientation points to.
    let head = |tet: usize, i: u8, a: u8| -> u8 {
        let (j, k) = complement2(i, a);
        let (_, s) = std.edge_lookup(tet, i, j, k);
        if s == 1 {
            k
        } else {
            j
        }
    };
    for s in &curve.segments {
        let i = s.vertex;
        let mut x = head(s.tet, i, s.enter);
        let y = head(s.tet, i, s.exit);
        let mut steps = 0;
        while x != y {
            // Cyclic successor on ∂T^i: the w with (i,x,w,·) even.
            let (a, b) = complement2(i, x);
            let w = if arrangement_sign(i, x, a, b) == 1 { a } else { b };
            let (cls, sg) = std.edge_lookup(s.tet, i, x, w);
            chain[cls] += sg;
            x = w;
            steps += 1;
            debug_assert!(steps <= 3);
        }
    }
    chain
}

/// Pentagon and hexagon 1-chains of a validated curve.
pub fn curve_chains(
    surf: &CuspSurface,
    tri: &Triangulation,
    curve: &BoundaryCurve,
) -> Result<(Vec<BigInt>, Vec<BigInt>), CuspError> {
    curve.validate(tri)?;
    Ok((pentagon_chain(surf, curve), hexagon_chain(surf, curve, tri)?))
}

// ---------------------------------------------------------------------------
// Intersection pairing.

/// The pairing of the oriented labels `e^{ij}` and `E^{i′j′k′}`: `+1` if
/// `i = i′, j = k′`; `−1` if `i = i′, j = j′`; `0` otherwise.
pub fn iota_label(i: u8, j: u8, ip: u8, jp: u8, kp: u8) -> i64 {
    if i != ip {
        0
    } else if j == kp {
        1
    } else if j == jp {
        -1
    } else {
        0
    }
}

/// The pairing of a pentagon 1-cell with a standard edge class: the label
/// table summed over the class's aligned labels.
fn iota_cell(std: &StandardCells, tet: usize, i: u8, j: u8, cls: usize) -> i64 {
    std.edges[cls]
        .iter()
        .filter(|&&(t2, _, _, _)| t2 == tet)
        .map(|&(_, ip, jp, kp)| iota_label(i, j, ip, jp, kp))
        .sum()
}

/// The intersection pairing of a pentagon 1-chain with a standard 1-chain.
/// Errors if the chains are supported on disjoint boundary components.
pub fn iota_pairing(surf: &CuspSurface, pent: &[BigInt], std_chain: &[BigInt]) -> Result<BigInt, CuspError> {
    let std = &surf.standard;
    let t = std.component.len() / 4;
    if pent.len() != 12 * t || std_chain.len() != std.edges.len() {
        return Err(CuspError::Matrix(MatrixError::DimensionMismatch));
    }
    let mut pent_comps = BTreeSet::new();
    for (cell, w) in pent.iter().enumerate() {
        if !w.is_zero() {
            pent_comps.insert(std.component[cell / 12 * 4 + cell % 12 / 3]);
        }
    }
    let mut std_comps = BTreeSet::new();
    for (cls, w) in std_chain.iter().enumerate() {
        if !w.is_zero() {
            let (tet, i, _, _) = std.edges[cls][0];
            std_comps.insert(std.component[4 * tet + i as usize]);
        }
    }
    if !pent_comps.is_empty() && !std_comps.is_empty() && pent_comps.is_disjoint(&std_comps) {
        return Err(CuspError::ComponentMismatch);
    }
    let mut total = BigInt::zero();
    for (cls, w) in std_chain.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        for tet in 0..t {
            for i in 0..4u8 {
                for j in 0..4u8 {
                    if j == i {
                        continue;
                    }
                    let v = iota_cell(std, tet, i, j, cls);
                    if v != 0 {
                        total += &pent[surf.pentagon.e_index(tet, i, j)] * w * v;
                    }
                }
            }
        }
    }
    Ok(total)
}

/// The intersection number of two curves on the same boundary component.
///
/// Every standard edge lies in a face of the triangulation, so the label
/// table registers each geometric crossing once from each side of the face;
/// on cycles the two contributions agree and the raw pairing is exactly
/// twice the intersection number.
pub fn iota_curves(
    surf: &CuspSurface,
    tri: &Triangulation,
    a: &BoundaryCurve,
    b: &BoundaryCurve,
) -> Result<BigInt, CuspError> {
    a.validate(tri)?;
    b.validate(tri)?;
    if a.component(surf) != b.component(surf) {
        return Err(CuspError::ComponentMismatch);
    }
    let raw = iota_pairing(surf, &pentagon_chain(surf, a), &standard_chain(surf, b))?;
    let half = &raw / 2;
    if &half * 2 != raw {
        return Err(CuspError::NotClosed);
    }
    Ok(half)
}

// ---------------------------------------------------------------------------
// Cartan data.

/// The Cartan matrix `A` of `sl_n` and the diagonal `D = diag(n−1, …, 1)`.
#[derive(Debug, Clone)]
pub struct CartanData {
    pub a_g: IntMatrix,
    pub d: IntMatrix,
}

/// Builds the Cartan data for `sl_n`, `n ≥ 2`.
pub fn cartan_data(n: i64) -> CartanData {
    let m = (n - 1) as usize;
    let mut a_g = IntMatrix::zero(m, m);
    let mut d = IntMatrix::zero(m, m);
    for i in 0..m {
        a_g.set(i, i, 2);
        if i + 1 < m {
            a_g.set(i, i + 1, -1);
            a_g.set(i + 1, i, -1);
        }
        d.set(i, i, n - 1 - i as i64);
    }
    CartanData { a_g, d }
}

// ---------------------------------------------------------------------------
// The maps δ, δ′ and γ.

/// Column index for a (cell, level) pair: cell-major, levels `1..=n−1`.
pub fn level_col(cell: usize, r: i64, n: i64) -> usize {
    cell * (n - 1) as usize + (r - 1) as usize
}

/// The map `δ: C₁(pentagon) ⊗ ℤ^{n−1} → J`, in the two-sum form
/// `e^{ij} ⊗ e_r ↦ Σ_{s_i=r−1}(s, ε_ij) − Σ_{s_i=r}(s, ε_kl)`.
/// Columns indexed by [`level_col`] over the pentagon edges.
pub fn delta_matrix(basis: &JBasis, surf: &CuspSurface, n: i64) -> Result<IntMatrix, CuspError> {
    let subs = lattice::subsimplices(n)?;
    let t = surf.standard.component.len() / 4;
    let mut m = IntMatrix::zero(basis.dim(), surf.pentagon.edge_count * (n - 1) as usize);
    for tet in 0..t {
        for i in 0..4u8 {
            for j in 0..4u8 {
                if j == i {
                    continue;
                }
                let (k, l) = complement2(i, j);
                let cell = surf.pentagon.e_index(tet, i, j);
                for r in 1..n {
                    let col = level_col(cell, r, n);
                    for &s in &subs {
                        if s[i as usize] == r - 1 {
                            basis.fold_into_matrix(&mut m, col, tet, s, (i, j), 1);
                        }
                        if s[i as usize] == r {
                            basis.fold_into_matrix(&mut m, col, tet, s, (k, l), -1);
                        }
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Interior points of the face `{i,j,k}` (fourth coordinate zero, others
/// positive) with `t_i = r`, of `Δ³ₙ`.
fn face_points(n: i64, i: u8, j: u8, k: u8, r: i64) -> Vec<Point> {
    let l = remaining(i, j, k);
    let mut out = Vec::new();
    for tj in 1..n {
        let tk = n - r - tj;
        if r >= 1 && tk >= 1 {
            let mut t = [0i64; 4];
            t[i as usize] = r;
            t[j as usize] = tj;
            t[k as usize] = tk;
            t[l as usize] = 0;
            out.push(t);
        }
    }
    out
}

/// The map `δ′: C₁(hexagon) ⊗ ℤ^{n−1} → J`:
/// `γ^{ijk} ⊗ e_r ↦ −ε↻ ((r−1)vᵢ + (n−r−1)vⱼ, ε_ij)` and
/// `β^{ijk} ⊗ e_r ↦ ε↻ Σ_{t ∈ face(ijk), t_i=r} Σ_{s+e=t} (s, e)`,
/// with `ε↻` the rotational sign of `(i,j,k)`.
/// Columns indexed by [`level_col`] over the hexagon edges (γ then β).
pub fn delta_prime_matrix(basis: &JBasis, surf: &CuspSurface, n: i64) -> Result<IntMatrix, CuspError> {
    let hex = &surf.hexagon;
    let mut m = IntMatrix::zero(basis.dim(), hex.edge_count * (n - 1) as usize);
    for (cell, &(tet, i, j, k)) in hex.gamma_cells.iter().enumerate() {
        let eps = rot_sign(i, j, k);
        for r in 1..n {
            let mut s = [0i64; 4];
            s[i as usize] = r - 1;
            s[j as usize] += n - r - 1;
            basis.fold_into_matrix(&mut m, level_col(cell, r, n), tet, s, (i, j), -eps);
        }
    }
    for (b, &(tet, i, j, k)) in hex.beta_cells.iter().enumerate() {
        let cell = hex.gamma_cells.len() + b;
        let eps = rot_sign(i, j, k);
        for r in 1..n {
            let col = level_col(cell, r, n);
            for t in face_points(n, i, j, k, r) {
                for (s, e) in lattice::midpoint_pairs(t)? {
                    basis.fold_into_matrix(&mut m, col, tet, s, e, eps);
                }
            }
        }
    }
    Ok(m)
}

/// The image of the generator `(s, ε_xy)_Δ` under `γ`: terms
/// `(label E^{σ1 σ2 σ3}_Δ, level r, coefficient)` from the four even `σ`
/// with `{σ0, σ1}` in the pair class of `{x,y}`, using
/// `v_{s,i} = e_{s_i+1} − e_{s_i}` with `e₀ = e_n = 0`.
pub fn gamma_generator_image(n: i64, s: Point, x: u8, y: u8) -> Vec<((u8, u8, u8), i64, i64)> {
    let class = lattice::pair_class(x, y);
    let mut out = Vec::new();
    for sigma in perm::all() {
        if perm::is_odd(sigma) || lattice::pair_class(sigma[0], sigma[1]) != class {
            continue;
        }
        let label = (sigma[1], sigma[2], sigma[3]);
        let si = s[sigma[1] as usize];
        if si < n - 1 {
            out.push((label, si + 1, 1));
        }
        if si >= 1 {
            out.push((label, si, -1));
        }
    }
    out
}

/// The map `γ: J → C₁(standard) ⊗ ℤ^{n−1}`. Rows indexed by [`level_col`]
/// over the standard edge classes; columns are JBasis coordinates.
pub fn gamma_matrix(basis: &JBasis, surf: &CuspSurface, n: i64) -> Result<IntMatrix, CuspError> {
    let std = &surf.standard;
    let subs = lattice::subsimplices(n)?;
    let t = std.component.len() / 4;
    let mut m = IntMatrix::zero(std.edges.len() * (n - 1) as usize, basis.dim());
    for tet in 0..t {
        for &s in &subs {
            for (xy, col) in [((0u8, 1u8), basis.slot_a(tet, s)), ((1, 2), basis.slot_b(tet, s))] {
                for ((i, j, k), r, coef) in gamma_generator_image(n, s, xy.0, xy.1) {
                    let (cls, sg) = std.edge_lookup(tet, i, j, k);
                    m.add_to(level_col(cls, r, n), col, coef * sg);
                }
            }
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Boundary equation rows.

/// Builds the boundary equation block `(A^∂ | B^∂ | ε^∂)` for the given
/// curves: one row per (curve, level) pair, curve-major. Row `(α, r)` holds
/// the `z`/`(1−z)` exponents of the boundary holonomy value
/// `C(z)` on the hexagon chain of `α` at level `r`, reduced to the two-shape
/// form with sign.
pub fn cusp_block(
    basis: &JBasis,
    tri: &Triangulation,
    surf: &CuspSurface,
    curves: &[BoundaryCurve],
    n: i64,
) -> Result<EquationBlock, CuspError> {
    let hex = &surf.hexagon;
    let rows = curves.len() * (n - 1) as usize;
    let mut a = IntMatrix::zero(rows, basis.columns());
    let mut b = IntMatrix::zero(rows, basis.columns());
    let mut parity = vec![0i64; rows];
    // Accumulate one z-edge exponent, log-reducing on the fly:
    // z ↦ A′, z′ = 1/(1−z) ↦ B′, z″ = −(1−z)/z ↦ C′ with a = A′−C′,
    // b = C′−B′ and a sign (−1)^{C′}.
    let put = |a: &mut IntMatrix, b: &mut IntMatrix, parity: &mut [i64], row: usize, col: usize, ij: (u8, u8), c: i64| {
        match lattice::pair_class(ij.0, ij.1) {
            lattice::EdgePairClass::E01_23 => a.add_to(row, col, c),
            lattice::EdgePairClass::E12_03 => b.add_to(row, col, -c),
            lattice::EdgePairClass::E02_13 => {
                a.add_to(row, col, -c);
                b.add_to(row, col, c);
                parity[row] += c;
            }
        }
    };
    for (ci, curve) in curves.iter().enumerate() {
        curve.validate(tri)?;
        let chain = hexagon_chain(surf, curve, tri)?;
        for r in 1..n {
            let row = ci * (n - 1) as usize + (r - 1) as usize;
            for (cell, w) in chain.iter().enumerate() {
                let w = w.to_i64().ok_or(CuspError::Matrix(MatrixError::DimensionMismatch))?;
                if w == 0 {
                    continue;
                }
                if cell < hex.gamma_cells.len() {
                    let (tet, i, j, k) = hex.gamma_cells[cell];
                    let eps = rot_sign(i, j, k);
                    let mut s = [0i64; 4];
                    s[i as usize] = r - 1;
                    s[j as usize] += n - r - 1;
                    put(&mut a, &mut b, &mut parity, row, basis.column(tet, s), (i, j), -eps * w);
                } else {
                    let (tet, i, j, k) = hex.beta_cells[cell - hex.gamma_cells.len()];
                    let eps = rot_sign(i, j, k);
                    for t in face_points(n, i, j, k, r) {
                        // X_t = −∏_{s+e=t} z^e_s: one global sign per factor.
                        parity[row] += eps * w;
                        for (s, e) in lattice::midpoint_pairs(t)? {
                            put(&mut a, &mut b, &mut parity, row, basis.column(tet, s), e, eps * w);
                        }
                    }
                }
            }
        }
    }
    let eps = parity
        .iter()
        .map(|p| if p.rem_euclid(2) == 0 { 1 } else { -1 })
        .collect();
    Ok(EquationBlock { a, b, eps })
}

/// Evaluates the boundary holonomy `C(z)` directly on a hexagon chain at
/// level `r`, as a product over the chain's cells (canonical labels):
/// `γ^{ijk} ↦ (z^{ε_ij}_{(r−1)vᵢ+(n−r−1)vⱼ})^{−ε↻}` and
/// `β^{ijk} ↦ ∏_{t ∈ face(ijk), t_i=r} X_t^{ε↻}`.
pub fn cusp_cocycle(
    basis: &JBasis,
    surf: &CuspSurface,
    z: &ShapeAssignment,
    chain: &[BigInt],
    r: i64,
    n: i64,
) -> Result<C64, CuspError> {
    if r < 1 || r >= n {
        return Err(CuspError::InvalidLevel);
    }
    let hex = &surf.hexagon;
    let mut value = C64::new(1.0, 0.0);
    for (cell, w) in chain.iter().enumerate() {
        let w = w.to_i64().ok_or(CuspError::Matrix(MatrixError::DimensionMismatch))?;
        if w == 0 {
            continue;
        }
        if cell < hex.gamma_cells.len() {
            let (tet, i, j, k) = hex.gamma_cells[cell];
            let eps = rot_sign(i, j, k);
            let mut s = [0i64; 4];
            s[i as usize] = r - 1;
            s[j as usize] += n - r - 1;
            value *= cpow(z.edge_shape(basis.column(tet, s), i, j), -eps * w);
        } else {
            let (tet, i, j, k) = hex.beta_cells[cell - hex.gamma_cells.len()];
            let eps = rot_sign(i, j, k);
            for t in face_points(n, i, j, k, r) {
                let mut x = C64::new(-1.0, 0.0);
                for (s, e) in lattice::midpoint_pairs(t)? {
                    x *= z.edge_shape(basis.column(tet, s), e.0, e.1);
                }
                value *= cpow(x, eps * w);
            }
        }
    }
    Ok(value)
}

/// Evaluates `C(z)` on a (validated) curve at level `r`.
pub fn cusp_cocycle_curve(
    basis: &JBasis,
    tri: &Triangulation,
    surf: &CuspSurface,
    z: &ShapeAssignment,
    curve: &BoundaryCurve,
    r: i64,
    n: i64,
) -> Result<C64, CuspError> {
    curve.validate(tri)?;
    let chain = hexagon_chain(surf, curve, tri)?;
    cusp_cocycle(basis, surf, z, &chain, r, n)
}

/// Re-export of the evaluation error type for callers matching on shapes.
pub type ShapeError = GluingError;

// ---------------------------------------------------------------------------
// Homology basis curves.

type Dart = (usize, u8); // (triangle id 4Δ+i, exit face)

fn dart_partner(tri: &Triangulation, d: Dart) -> Dart {
    let (node, face) = d;
    let (tet, i) = (node / 4, (node % 4) as u8);
    let g = tri.gluing(tet, face);
    let p = g.perm;
    (4 * g.neighbor + p[i as usize] as usize, p[face as usize])
}

/// Cancels backtracking pairs (a dart immediately followed by its partner),
/// cyclically.
fn cyclic_reduce(tri: &Triangulation, walk: Vec<Dart>) -> Vec<Dart> {
    let mut stack: Vec<Dart> = Vec::with_capacity(walk.len());
    for d in walk {
        if stack.last().is_some_and(|&top| dart_partner(tri, top) == d) {
            stack.pop();
        } else {
            stack.push(d);
        }
    }
    while stack.len() >= 2 && dart_partner(tri, *stack.last().unwrap()) == stack[0] {
        stack.pop();
        stack.remove(0);
    }
    stack
}

fn curve_from_walk(tri: &Triangulation, walk: &[Dart]) -> Option<BoundaryCurve> {
    if walk.is_empty() {
        return None;
    }
    let m = walk.len();
    let mut segments = Vec::with_capacity(m);
    for k in 0..m {
        let (pnode, pface) = walk[(k + m - 1) % m];
        let (node, exit) = walk[k];
        let g = tri.gluing(pnode / 4, pface);
        let enter = g.perm[pface as usize];
        debug_assert_eq!(dart_partner(tri, (pnode, pface)).0, node);
        segments.push(CurveSegment {
            tet: node / 4,
            vertex: (node % 4) as u8,
            enter,
            exit,
        });
    }
    Some(BoundaryCurve { segments })
}

/// Constructs, for each boundary component of genus ≥ 1 (in profile order),
/// `2·genus` curves whose homology classes form a basis of the component's
/// summand of `H₁(∂M)`. Curves come from the fundamental cycles of a
/// spanning tree of the triangle adjacency graph, combined by the
/// unimodular row transform of a Smith normal form of their coordinates.
pub fn homology_basis_curves(
    tri: &Triangulation,
    surf: &CuspSurface,
) -> Result<Vec<Vec<BoundaryCurve>>, CuspError> {
    let coords = QuotientCoords::new(&surf.standard.d1, &surf.standard.d2)?;
    let t = tri.tet_count();
    let mut out = Vec::new();
    for comp in &surf.profile.components {
        if comp.genus == 0 {
            continue;
        }
        let nodes: Vec<usize> = (0..4 * t)
            .filter(|&id| surf.standard.component[id] == comp.vertex_class)
            .collect();
        let root = nodes[0];
        // BFS spanning tree; `parent[n]` is the dart leading into `n`.
        let mut parent: BTreeMap<usize, Dart> = BTreeMap::new();
        let mut tree_darts: BTreeSet<Dart> = BTreeSet::new();
        let mut queue = vec![root];
        let mut visited: BTreeSet<usize> = [root].into_iter().collect();
        while let Some(node) = queue.pop() {
            let i = (node % 4) as u8;
            for face in 0..4u8 {
                if face == i {
                    continue;
                }
                let d = (node, face);
                let (next, back) = dart_partner(tri, d);
                if visited.insert(next) {
                    parent.insert(next, d);
                    tree_darts.insert(d);
                    tree_darts.insert((next, back));
                    queue.push(next);
                }
            }
        }
        let path_from_root = |mut node: usize| -> Vec<Dart> {
            let mut path = Vec::new();
            while node != root {
                let d = parent[&node];
                path.push(d);
                node = d.0;
            }
            path.reverse();
            path
        };
        let reverse_walk = |walk: &[Dart]| -> Vec<Dart> {
            walk.iter().rev().map(|&d| dart_partner(tri, d)).collect()
        };
        // Fundamental cycles of the non-tree sides.
        let mut walks: Vec<Vec<Dart>> = Vec::new();
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for &node in &nodes {
            let i = (node % 4) as u8;
            for face in 0..4u8 {
                if face == i {
                    continue;
                }
                let d = (node, face);
                let partner = dart_partner(tri, d);
                if tree_darts.contains(&d) || d > partner {
                    continue;
                }
                let mut walk = path_from_root(node);
                walk.push(d);
                walk.extend(reverse_walk(&path_from_root(partner.0)));
                let walk = cyclic_reduce(tri, walk);
                let Some(curve) = curve_from_walk(tri, &walk) else {
                    continue;
                };
                let chain = standard_chain(surf, &curve);
                let co = coords
                    .coords(&chain)?
                    .ok_or(CuspError::CurveBasisUnrealizable)?;
                walks.push(walk);
                rows.push(co);
            }
        }
        let g2 = 2 * comp.genus;
        if rows.is_empty() {
            return Err(CuspError::CurveBasisUnrealizable);
        }
        let ncols = rows[0].len();
        let mut m = IntMatrix::zero(rows.len(), ncols);
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        let snf = smith_normal_form(&m);
        if snf.rank < g2 || snf.diagonal()[..g2].iter().any(|d| d.abs() != BigInt::from(1)) {
            return Err(CuspError::CurveBasisUnrealizable);
        }
        let mut basis = Vec::with_capacity(g2);
        for row in 0..g2 {
            let mut combined: Vec<Dart> = Vec::new();
            for (j, walk) in walks.iter().enumerate() {
                let c = snf
                    .u
                    .get(row, j)
                    .to_i64()
                    .ok_or(CuspError::CurveBasisUnrealizable)?;
                for _ in 0..c.unsigned_abs() {
                    if c > 0 {
                        combined.extend_from_slice(walk);
                    } else {
                        combined.extend(reverse_walk(walk));
                    }
                }
            }
            let combined = cyclic_reduce(tri, combined);
            let curve = curve_from_walk(tri, &combined).ok_or(CuspError::CurveBasisUnrealizable)?;
            curve.validate(tri)?;
            basis.push(curve);
        }
        out.push(basis);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jcomplex::JComplex;
    use crate::matrix::image_membership;
    use crate::search::for_each_triangulation;
    use num_traits::One;

    fn fixture() -> Triangulation {
        let mut tri = None;
        for_each_triangulation(2, &mut |t| {
            if matches!(t.boundary_profile(), Ok(bp) if bp.c > 0) {
                tri = Some(t.clone());
                false
            } else {
                true
            }
        });
        tri.expect("a cusped 2-tetrahedron triangulation exists")
    }

    fn is_zero_vec(v: &[BigInt]) -> bool {
        v.iter().all(|x| x.is_zero())
    }

    #[test]
    fn cellulations_are_complexes() {
        let tri = fixture();
        let surf = CuspSurface::new(&tri).unwrap();
        let t = tri.tet_count();
        assert_eq!(surf.standard.edges.len(), 6 * t);
        assert_eq!(surf.standard.vertices.len(), surf.corner_cycles.len());
        assert_eq!(surf.pentagon.edge_count, 12 * t);
        assert_eq!(surf.pentagon.vertices.len(), 6 * t);
        assert_eq!(surf.hexagon.edge_count, 24 * t);
        assert_eq!(surf.hexagon.vertices.len(), 12 * t);
        assert!(surf.standard.d1.mul(&surf.standard.d2).unwrap().is_zero());
        assert!(surf.pentagon.d1.mul(&surf.pentagon.d2).unwrap().is_zero());
        assert!(surf.hexagon.d1.mul(&surf.hexagon.d2).unwrap().is_zero());
        // Euler characteristic of the standard cellulation matches the
        // boundary profile.
        let chi = surf.corner_cycles.len() as i64 - 6 * t as i64 + 4 * t as i64;
        let expected: i64 = surf
            .profile
            .components
            .iter()
            .map(|c| 2 - 2 * c.genus as i64)
            .sum();
        assert_eq!(chi, expected);
    }

    #[test]
    fn iota_table() {
        assert_eq!(iota_label(0, 1, 0, 2, 1), 1);
        assert_eq!(iota_label(0, 1, 0, 1, 2), -1);
        assert_eq!(iota_label(0, 1, 1, 0, 2), 0);
    }

    #[test]
    fn delta_two_forms_agree() {
        // The two-sum form equals the double sum
        // Σ_{t_i=r} Σ_{s+e=t} t_j (s,e) on a single simplex.
        for n in 2..=5i64 {
            let basis = JBasis::new(1, n).unwrap();
            let subs = lattice::subsimplices(n).unwrap();
            for i in 0..4u8 {
                for j in 0..4u8 {
                    if j == i {
                        continue;
                    }
                    let (k, l) = complement2(i, j);
                    for r in 1..n {
                        let mut v1 = vec![BigInt::zero(); basis.dim()];
                        for &s in &subs {
                            if s[i as usize] == r - 1 {
                                basis.fold_into(&mut v1, 0, s, (i, j), 1);
                            }
                            if s[i as usize] == r {
                                basis.fold_into(&mut v1, 0, s, (k, l), -1);
                            }
                        }
                        let mut v2 = vec![BigInt::zero(); basis.dim()];
                        for t in lattice::lattice_points(n).unwrap() {
                            if lattice::classify_point(t).0 == lattice::PointKind::Vertex
                                || t[i as usize] != r
                            {
                                continue;
                            }
                            let tj = t[j as usize];
                            if tj == 0 {
                                continue;
                            }
                            for (s, e) in lattice::midpoint_pairs(t).unwrap() {
                                basis.fold_into(&mut v2, 0, s, e, tj);
                            }
                        }
                        assert_eq!(v1, v2, "n={n} i={i} j={j} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn gamma_displayed_image() {
        // γ(s, ε₀₁) = E^{032}⊗v_{s,0} + E^{123}⊗v_{s,1} + E^{210}⊗v_{s,2}
        //           + E^{301}⊗v_{s,3}.
        let n = 4;
        let s = [1, 0, 1, 0];
        let img = gamma_generator_image(n, s, 0, 1);
        let mut by_label: BTreeMap<(u8, u8, u8), Vec<(i64, i64)>> = BTreeMap::new();
        for (label, r, c) in img {
            by_label.entry(label).or_default().push((r, c));
        }
        let v = |idx: usize| -> Vec<(i64, i64)> {
            let si = s[idx];
            let mut out = Vec::new();
            if si < n - 1 {
                out.push((si + 1, 1));
            }
            if si >= 1 {
                out.push((si, -1));
            }
            out
        };
        let want: BTreeMap<(u8, u8, u8), Vec<(i64, i64)>> = [
            ((0, 3, 2), v(0)),
            ((1, 2, 3), v(1)),
            ((2, 1, 0), v(2)),
            ((3, 0, 1), v(3)),
        ]
        .into_iter()
        .collect();
        assert_eq!(by_label, want);
    }

    #[test]
    fn gamma_well_defined() {
        // γ((s,ε₀₁)+(s,ε₁₂)+(s,ε₀₂)) = ∂(Σᵢ T^i ⊗ v_{s,i}).
        let tri = fixture();
        let surf = CuspSurface::new(&tri).unwrap();
        for n in [2i64, 3] {
            let levels = (n - 1) as usize;
            let rows = surf.standard.edges.len() * levels;
            for tet in 0..tri.tet_count() {
                for &s in &lattice::subsimplices(n).unwrap() {
                    let mut lhs = vec![BigInt::zero(); rows];
                    for (x, y) in [(0u8, 1u8), (1, 2), (0, 2)] {
                        for ((i, j, k), r, c) in gamma_generator_image(n, s, x, y) {
                            let (cls, sg) = surf.standard.edge_lookup(tet, i, j, k);
                            lhs[level_col(cls, r, n)] += c * sg;
                        }
                    }
                    let mut rhs = vec![BigInt::zero(); rows];
                    for i in 0..4u8 {
                        let col = surf.standard.d2.col(4 * tet + i as usize);
                        let si = s[i as usize];
                        for (cls, v) in col.iter().enumerate() {
                            if si < n - 1 {
                                rhs[level_col(cls, si + 1, n)] += v;
                            }
                            if si >= 1 {
                                rhs[level_col(cls, si, n)] -= v;
                            }
                        }
                    }
                    assert_eq!(lhs, rhs, "n={n} tet={tet} s={s:?}");
                }
            }
        }
    }

    #[test]
    fn delta_gamma_adjoint() {
        // Ω(δ(e^{ij}⊗e_r), (s,e)) = ι⊗⟨,⟩(e^{ij}⊗e_r, γ(s,e)), pairing the
        // pentagon generator with γ's label image inside the same simplex.
        let tri = fixture();
        let surf = CuspSurface::new(&tri).unwrap();
        for n in [2i64, 3] {
            let basis = JBasis::new(tri.tet_count(), n).unwrap();
            let delta = delta_matrix(&basis, &surf, n).unwrap();
            let jdim = basis.dim();
            let subs = lattice::subsimplices(n).unwrap();
            for tet in 0..tri.tet_count() {
                for i in 0..4u8 {
                    for j in 0..4u8 {
                        if j == i {
                            continue;
                        }
                        for r in 1..n {
                            let xcol = level_col(surf.pentagon.e_index(tet, i, j), r, n);
                            let dx = delta.col(xcol);
                            for tet2 in 0..tri.tet_count() {
                                for &s in &subs {
                                    for (xy, col) in
                                        [((0u8, 1u8), basis.slot_a(tet2, s)), ((1, 2), basis.slot_b(tet2, s))]
                                    {
                                        let mut y = vec![BigInt::zero(); jdim];
                                        y[col] = BigInt::one();
                                        let lhs = crate::jcomplex::omega_pairing(&dx, &y).unwrap();
                                        let mut rhs = BigInt::zero();
                                        if tet2 == tet {
                                            for ((ip, jp, kp), lev, c) in
                                                gamma_generator_image(n, s, xy.0, xy.1)
                                            {
                                                if lev == r {
                                                    rhs += iota_label(i, j, ip, jp, kp) * c;
                                                }
                                            }
                                        }
                                        assert_eq!(
                                            lhs, rhs,
                                            "n={n} x=({tet},{i},{j},{r}) y=({tet2},{s:?},{xy:?})"
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn basis_curves_and_chains() {
        let tri = fixture();
        let surf = CuspSurface::new(&tri).unwrap();
        let families = homology_basis_curves(&tri, &surf).unwrap();
        assert!(!families.is_empty());
        for family in &families {
            assert_eq!(family.len() % 2, 0);
            for curve in family {
                curve.validate(&tri).unwrap();
                let (pent, hexc) = curve_chains(&surf, &tri, curve).unwrap();
                let stdc = standard_chain(&surf, curve);
                assert!(is_zero_vec(&surf.pentagon.d1.mul_vec(&pent).unwrap()));
                assert!(is_zero_vec(&surf.hexagon.d1.mul_vec(&hexc).unwrap()));
                assert!(is_zero_vec(&surf.standard.d1.mul_vec(&stdc).unwrap()));
                // Pairing a cycle with a boundary gives zero.
                for c in 0..surf.standard.d2.cols() {
                    let bdry = surf.standard.d2.col(c);
                    let v = iota_pairing(&surf, &pent, &bdry).unwrap();
                    assert!(v.is_zero());
                }
            }
            if family.len() == 2 {
                let p = iota_curves(&surf, &tri, &family[0], &family[1]).unwrap();
                assert_eq!(p.abs(), BigInt::one(), "torus basis pairing ±1");
                let s = iota_curves(&surf, &tri, &family[0], &family[0]).unwrap();
                assert!(s.is_zero(), "self-pairing 0");
            }
        }
    }

    #[test]
    fn cusp_rows_match_delta_prime() {
        let tri = fixture();
        let surf = CuspSurface::new(&tri).unwrap();
        let curves: Vec<BoundaryCurve> = homology_basis_curves(&tri, &surf)
            .unwrap()
            .into_iter()
            .flatten()
            .collect();
        for n in [2i64, 3] {
            let basis = JBasis::new(tri.tet_count(), n).unwrap();
            let dp = delta_prime_matrix(&basis, &surf, n).unwrap();
            let block = cusp_block(&basis, &tri, &surf, &curves, n).unwrap();
            for (ci, curve) in curves.iter().enumerate() {
                let chain = hexagon_chain(&surf, curve, &tri).unwrap();
                for r in 1..n {
                    let mut x = vec![BigInt::zero(); dp.cols()];
                    for (cell, w) in chain.iter().enumerate() {
                        x[level_col(cell, r, n)] = w.clone();
                    }
                    let want = dp.mul_vec(&x).unwrap();
                    let row = ci * (n - 1) as usize + (r - 1) as usize;
                    assert_eq!(block.j_row(row), want, "n={n} curve={ci} r={r}");
                }
            }
        }
    }

    #[test]
    fn near_far_and_level_identities() {
        let tri = fixture();
        let surf = CuspSurface::new(&tri).unwrap();
        let coords = QuotientCoords::new(&surf.standard.d1, &surf.standard.d2).unwrap();
        let curves: Vec<BoundaryCurve> = homology_basis_curves(&tri, &surf)
            .unwrap()
            .into_iter()
            .flatten()
            .collect();
        for n in [2i64, 3] {
            let jc = JComplex::new(&tri, n).unwrap();
            let basis = &jc.basis;
            let delta = delta_matrix(basis, &surf, n).unwrap();
            let dp = delta_prime_matrix(basis, &surf, n).unwrap();
            let gamma = gamma_matrix(basis, &surf, n).unwrap();
            let cd = cartan_data(n);
            let dad = cd.d.mul(&cd.a_g).unwrap().mul(&cd.d).unwrap();
            for curve in &curves {
                let pent = pentagon_chain(&surf, curve);
                let hexc = hexagon_chain(&surf, curve, &tri).unwrap();
                let base = coords.coords(&standard_chain(&surf, curve)).unwrap().unwrap();
                for r in 1..n {
                    let mut xp = vec![BigInt::zero(); delta.cols()];
                    for (cell, w) in pent.iter().enumerate() {
                        xp[level_col(cell, r, n)] = w.clone();
                    }
                    let u = delta.mul_vec(&xp).unwrap();
                    // δ of a cycle lies in Ker β*.
                    assert!(is_zero_vec(&jc.beta_star.mul_vec(&u).unwrap()));
                    // δ_r = (n−r)·δ′_r modulo Im β.
                    let mut xh = vec![BigInt::zero(); dp.cols()];
                    for (cell, w) in hexc.iter().enumerate() {
                        xh[level_col(cell, r, n)] = w.clone();
                    }
                    let up = dp.mul_vec(&xh).unwrap();
                    let diff: Vec<BigInt> = u
                        .iter()
                        .zip(&up)
                        .map(|(a, b)| a - b * (n - r))
                        .collect();
                    assert!(
                        image_membership(&jc.beta, &diff).unwrap().is_some(),
                        "n={n} r={r}"
                    );
                    // γ∘δ = id ⊗ D·A·D in homology coordinates.
                    let v = gamma.mul_vec(&u).unwrap();
                    for rp in 1..n {
                        let mut slice = vec![BigInt::zero(); surf.standard.edges.len()];
                        for cls in 0..surf.standard.edges.len() {
                            slice[cls] = v[level_col(cls, rp, n)].clone();
                        }
                        let got = coords.coords(&slice).unwrap().unwrap();
                        let factor = dad.get((rp - 1) as usize, (r - 1) as usize);
                        let want: Vec<BigInt> = base.iter().map(|x| x * &factor).collect();
                        assert_eq!(got, want, "n={n} r={r} r'={rp}");
                    }
                }
            }
            // Ω(δ′(α⊗e_r), δ′(β⊗e_s)) = ι(α,β)·⟨e_r, A e_s⟩.
            for a in &curves {
                for b in &curves {
                    let iota = match iota_curves(&surf, &tri, a, b) {
                        Ok(v) => v,
                        Err(CuspError::ComponentMismatch) => BigInt::zero(),
                        Err(e) => panic!("{e:?}"),
                    };
                    let dp_of = |c: &BoundaryCurve, r: i64| {
                        let chain = hexagon_chain(&surf, c, &tri).unwrap();
                        let mut x = vec![BigInt::zero(); dp.cols()];
                        for (cell, w) in chain.iter().enumerate() {
                            x[level_col(cell, r, n)] = w.clone();
                        }
                        dp.mul_vec(&x).unwrap()
                    };
                    for r in 1..n {
                        for s in 1..n {
                            let w = crate::jcomplex::omega_pairing(&dp_of(a, r), &dp_of(b, s))
                                .unwrap();
                            let want = &iota * cd.a_g.get((r - 1) as usize, (s - 1) as usize);
                            assert_eq!(w, want, "n={n} r={r} s={s}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cocycle_matches_block_evaluation() {
        use crate::gluing::{evaluate_block, extend_shapes};
        let tri = fixture();
        let surf = CuspSurface::new(&tri).unwrap();
        let curves: Vec<BoundaryCurve> = homology_basis_curves(&tri, &surf)
            .unwrap()
            .into_iter()
            .flatten()
            .collect();
        for n in [2i64, 3] {
            let basis = JBasis::new(tri.tet_count(), n).unwrap();
            let block = cusp_block(&basis, &tri, &surf, &curves, n).unwrap();
            let cols = basis.columns();
            let raw: Vec<C64> = (0..cols)
                .map(|k| C64::new(0.4 + 0.05 * k as f64, 0.9 - 0.03 * k as f64))
                .collect();
            let z = extend_shapes(&raw, tri.tet_count(), n).unwrap();
            let vals = evaluate_block(&block, &z).unwrap();
            for (ci, curve) in curves.iter().enumerate() {
                for r in 1..n {
                    let row = ci * (n - 1) as usize + (r - 1) as usize;
                    let direct =
                        cusp_cocycle_curve(&basis, &tri, &surf, &z, curve, r, n).unwrap();
                    let diff = (vals[row] - direct).norm_sqr();
                    assert!(
                        diff <= 1e-20 * direct.norm_sqr().max(1.0),
                        "n={n} curve={ci} r={r}: {:?} vs {:?}",
                        vals[row],
                        direct
                    );
                }
            }
        }
    }
}
