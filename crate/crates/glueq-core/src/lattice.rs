//! Integral points, subsimplices, and midpoint decompositions of the dilated
//! tetrahedron Δ³ₙ, and their quotient under face pairings.
//!
//! * A *lattice point* is `t = (t₀,t₁,t₂,t₃)` with nonnegative entries summing
//!   to `n`; its *kind* is read off the number of zero entries (3 → vertex,
//!   2 → edge, 1 → face, 0 → interior).
//! * A *subsimplex* is the translate `s + Δ³₂` with `s` summing to `n−2`.
//! * An *edge vector* is one of the six 0/1-vectors `ε_ij` with exactly two
//!   unit entries; opposite edges (`ε₀₁`/`ε₂₃`, …) share a *pair class*.
//! * A midpoint decomposition of a point `t` is a pair `s + e = t`; edge
//!   points have 1, face points 3, interior points 6.

use alloc::vec::Vec;

use crate::perm::Perm;
use crate::triangulation::Triangulation;
use crate::unionfind::UnionFind;

/// A point of `Δ³ₘ(ℤ)` for some `m` (lattice point, subsimplex vector, or
/// edge vector, depending on the coordinate sum).
pub type Point = [i64; 4];

/// Errors for the lattice operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    /// `n < 2`.
    InvalidN,
    /// A vertex point has no midpoint decomposition.
    VertexPoint,
}

/// The kind of a lattice point, ordered as used for deterministic row
/// ordering: edge < face < interior (< vertex, which never indexes rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PointKind {
    Edge,
    Face,
    Interior,
    Vertex,
}

/// The three pair classes of opposite tetrahedron edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgePairClass {
    /// `{ε₀₁, ε₂₃}` — exponent lands in A′ (shape `z`).
    E01_23,
    /// `{ε₁₂, ε₀₃}` — exponent lands in B′ (shape `z′ = 1/(1−z)`).
    E12_03,
    /// `{ε₀₂, ε₁₃}` — exponent lands in C′ (shape `z″ = 1 − 1/z`).
    E02_13,
}

/// The edge vector `ε_ij` (unordered; `i ≠ j`).
pub fn epsilon(i: u8, j: u8) -> Point {
    debug_assert!(i != j && i < 4 && j < 4);
    let mut e = [0i64; 4];
    e[i as usize] = 1;
    e[j as usize] = 1;
    e
}

/// The pair class of the edge `{i, j}`.
pub fn pair_class(i: u8, j: u8) -> EdgePairClass {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 1) | (2, 3) => EdgePairClass::E01_23,
        (1, 2) | (0, 3) => EdgePairClass::E12_03,
        (0, 2) | (1, 3) => EdgePairClass::E02_13,
        _ => unreachable!("distinct labels in 0..4"),
    }
}

/// All points of `Δ³ₙ(ℤ)` in lexicographic order; `binom(n+3, 3)` of them.
pub fn lattice_points(n: i64) -> Result<Vec<Point>, LatticeError> {
    if n < 2 {
        return Err(LatticeError::InvalidN);
    }
    Ok(simplex_points(n))
}

/// All subsimplex translation vectors (points of `Δ³ₙ₋₂(ℤ)`) in lexicographic
/// order; `binom(n+1, 3)` of them.
pub fn subsimplices(n: i64) -> Result<Vec<Point>, LatticeError> {
    if n < 2 {
        return Err(LatticeError::InvalidN);
    }
    Ok(simplex_points(n - 2))
}

fn simplex_points(m: i64) -> Vec<Point> {
    let mut out = Vec::new();
    for a in 0..=m {
        for b in 0..=(m - a) {
            for c in 0..=(m - a - b) {
                out.push([a, b, c, m - a - b - c]);
            }
        }
    }
    out
}

/// Kind and type signature (coordinates sorted descending) of a point.
pub fn classify_point(t: Point) -> (PointKind, Point) {
    let zeros = t.iter().filter(|&&x| x == 0).count();
    let kind = match zeros {
        3 => PointKind::Vertex,
        2 => PointKind::Edge,
        1 => PointKind::Face,
        0 => PointKind::Interior,
        _ => unreachable!("a point of Δ³ₙ, n ≥ 2, has at most 3 zeros"),
    };
    let mut sig = t;
    sig.sort_unstable_by(|a, b| b.cmp(a));
    (kind, sig)
}

/// A decomposition `t = s + ε_ij`: the subsimplex `s` and the edge `(i, j)`.
pub type MidpointPair = (Point, (u8, u8));

/// All decompositions `t = s + ε_ij` with `s` componentwise nonnegative.
/// Edge points have exactly 1, face points 3, interior points 6.
pub fn midpoint_pairs(t: Point) -> Result<Vec<MidpointPair>, LatticeError> {
    if classify_point(t).0 == PointKind::Vertex {
        return Err(LatticeError::VertexPoint);
    }
    let mut out = Vec::new();
    for (i, j) in crate::triangulation::EDGE_PAIRS {
        let e = epsilon(i, j);
        let s = [t[0] - e[0], t[1] - e[1], t[2] - e[2], t[3] - e[3]];
        if s.iter().all(|&x| x >= 0) {
            out.push((s, (i, j)));
        }
    }
    Ok(out)
}

/// Image of a point under a vertex-label permutation: `t′_{σ(i)} = t_i`.
pub fn apply_perm(sigma: Perm, t: Point) -> Point {
    let mut out = [0i64; 4];
    for i in 0..4 {
        out[sigma[i] as usize] = t[i];
    }
    out
}

/// One equivalence class of pairs `(tet, point)` under the face pairings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralPointClass {
    pub kind: PointKind,
    /// Sorted descending coordinates; constant on the class.
    pub type_signature: Point,
    /// Members `(tet, t)`, sorted by `(tet, t)`.
    pub members: Vec<(usize, Point)>,
}

/// The quotient of the non-vertex integral points of all tetrahedra under the
/// face pairings, in the deterministic row order used by every matrix: kind
/// rank (edge < face < interior), then smallest member key `(tet, t)`.
#[derive(Debug, Clone)]
pub struct PointClasses {
    pub n: i64,
    pub classes: Vec<IntegralPointClass>,
    /// `(tet, t) → class index` for every non-vertex `t`.
    index: alloc::collections::BTreeMap<(usize, Point), usize>,
}

impl PointClasses {
    /// Number of non-vertex classes `P`.
    pub fn p(&self) -> usize {
        self.classes.len()
    }

    /// Class index of `(tet, t)`; `None` for vertex points.
    pub fn class_of(&self, tet: usize, t: Point) -> Option<usize> {
        self.index.get(&(tet, t)).copied()
    }
}

/// Builds the quotient of the non-vertex integral points under face pairings.
///
/// A point `t` with `t_f = 0` lies on face `f` and is identified with
/// `apply_perm(σ, t)` on the neighbor through `f`; interior points form
/// singleton classes. Edge points are identified around full edge cycles by
/// union-find transitivity.
pub fn point_classes(tri: &Triangulation, n: i64) -> Result<PointClasses, LatticeError> {
    let points = lattice_points(n)?;
    let t_count = tri.tet_count();
    let non_vertex: Vec<Point> = points
        .into_iter()
        .filter(|&t| classify_point(t).0 != PointKind::Vertex)
        .collect();
    let per_tet = non_vertex.len();

    let mut key_of = alloc::collections::BTreeMap::new();
    for (i, &t) in non_vertex.iter().enumerate() {
        key_of.insert(t, i);
    }

    let mut uf = UnionFind::new(per_tet * t_count);
    for tet in 0..t_count {
        for (i, &t) in non_vertex.iter().enumerate() {
            for face in 0..4u8 {
                if t[face as usize] != 0 {
                    continue;
                }
                let g = tri.gluing(tet, face);
                let image = apply_perm(g.perm, t);
                let j = key_of[&image];
                uf.union(tet * per_tet + i, g.neighbor * per_tet + j);
            }
        }
    }

    let mut classes: Vec<IntegralPointClass> = uf
        .classes()
        .into_iter()
        .map(|members| {
            let members: Vec<(usize, Point)> = members
                .into_iter()
                .map(|k| (k / per_tet, non_vertex[k % per_tet]))
                .collect();
            let (kind, sig) = classify_point(members[0].1);
            debug_assert!(members
                .iter()
                .all(|&(_, t)| classify_point(t) == (kind, sig)));
            let mut members = members;
            members.sort_unstable();
            IntegralPointClass {
                kind,
                type_signature: sig,
                members,
            }
        })
        .collect();
    classes.sort_by(|a, b| (a.kind, &a.members[0]).cmp(&(b.kind, &b.members[0])));

    let mut index = alloc::collections::BTreeMap::new();
    for (ci, class) in classes.iter().enumerate() {
        for &(tet, t) in &class.members {
            index.insert((tet, t), ci);
        }
    }
    Ok(PointClasses { n, classes, index })
}

/// `binom(m, 3)` helper used by the count checks.
pub fn binom3(m: i64) -> usize {
    if m < 3 {
        0
    } else {
        (m * (m - 1) * (m - 2) / 6) as usize
    }
}
