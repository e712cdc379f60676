//! First homology of the manifold and of the space obtained by collapsing
//! each boundary component, via the dual-spine presentation.
//!
//! The dual spine of an ideal triangulation has one vertex per tetrahedron,
//! one edge per face class, and one 2-cell per edge class (the manifold
//! deformation-retracts onto it). Collapsing a spanning tree of the dual
//! graph gives the presentation used here:
//!
//! * generators: face classes;
//! * relations: spanning-tree faces (set to zero), the edge-cycle word around
//!   every 1-cell, and — for the collapsed space — the face-crossing word of
//!   every peripheral basis curve.
//!
//! The sign of a face generator in a relation is the direction in which the
//! word crosses the face: `+1` when it crosses from the canonical first side
//! of the face class (its smallest `(tet, face)` member) to the second.

use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::homology::AbelianGroup;
use crate::matrix::{smith_normal_form, IntMatrix};
use crate::triangulation::Triangulation;
use crate::unionfind::UnionFind;

/// One step of the walk around an edge class: the walk leaves `tet` through
/// `face` (and the edge maps on by the gluing permutation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeCrossing {
    pub tet: usize,
    pub face: u8,
}

/// The full cycle of crossings around the 1-cell containing
/// `(tet, {i, j})`, starting from that representative.
pub fn edge_cycle(tri: &Triangulation, tet: usize, i: u8, j: u8) -> Vec<EdgeCrossing> {
    assert!(i != j && i < 4 && j < 4);
    // Directed state: (tet, directed edge (u, v), face we entered through).
    let other = |u: u8, v: u8| -> (u8, u8) {
        let mut it = (0..4u8).filter(|&x| x != u && x != v);
        let a = it.next().unwrap();
        let b = it.next().unwrap();
        (a, b)
    };
    let (_k, l) = other(i, j);
    let start = (tet, (i, j), l); // pretend we entered through l; cross k next
    let mut state = start;
    let mut crossings = Vec::new();
    loop {
        let (t, (u, v), entered) = state;
        let (a, b) = other(u, v);
        let g_face = if a == entered { b } else { a };
        crossings.push(EdgeCrossing { tet: t, face: g_face });
        let g = tri.gluing(t, g_face);
        let p = g.perm;
        state = (
            g.neighbor,
            (p[u as usize], p[v as usize]),
            p[g_face as usize],
        );
        if state == start {
            return crossings;
        }
    }
}

/// Face classes with a canonical co-orientation, and the crossing sign
/// helper shared by the relation words.
pub struct DualSpine {
    /// Face classes as pairs of `(tet, face)`, sorted; index = generator.
    pub face_classes: Vec<Vec<(usize, u8)>>,
    face_index: alloc::collections::BTreeMap<(usize, u8), usize>,
    /// Face classes in a spanning tree of the dual graph.
    pub tree: Vec<usize>,
}

impl DualSpine {
    pub fn new(tri: &Triangulation) -> DualSpine {
        let classes = tri.cell_classes();
        let face_classes = classes.faces;
        let mut face_index = alloc::collections::BTreeMap::new();
        for (i, fc) in face_classes.iter().enumerate() {
            for &(t, f) in fc {
                face_index.insert((t, f), i);
            }
        }
        // Spanning tree of the dual graph by a union-find sweep in class order.
        let mut uf = UnionFind::new(tri.tet_count());
        let mut tree = Vec::new();
        for (i, fc) in face_classes.iter().enumerate() {
            let (t, f) = fc[0];
            let nbr = tri.gluing(t, f).neighbor;
            if uf.union(t, nbr) {
                tree.push(i);
            }
        }
        DualSpine {
            face_classes,
            face_index,
            tree,
        }
    }

    /// Generator index and sign of crossing out of `tet` through `face`:
    /// `+1` when `(tet, face)` is the canonical first side of its class.
    pub fn crossing(&self, tet: usize, face: u8) -> (usize, i64) {
        let idx = self.face_index[&(tet, face)];
        let sign = if self.face_classes[idx][0] == (tet, face) {
            1
        } else {
            -1
        };
        (idx, sign)
    }
}

/// Builds the abelianized relation matrix (rows = face-class generators,
/// columns = relations): spanning-tree relations, edge-cycle words, and the
/// given extra crossing words.
fn relation_matrix(
    tri: &Triangulation,
    spine: &DualSpine,
    extra_words: &[Vec<(usize, u8)>],
) -> IntMatrix {
    let classes = tri.cell_classes();
    let gens = spine.face_classes.len();
    let cols = spine.tree.len() + classes.e() + extra_words.len();
    let mut m = IntMatrix::zero(gens, cols);
    let mut col = 0;
    for &fi in &spine.tree {
        m.set(fi, col, 1);
        col += 1;
    }
    for ec in &classes.edges {
        let (tet, (i, j)) = ec[0];
        for crossing in edge_cycle(tri, tet, i, j) {
            let (gen, sign) = spine.crossing(crossing.tet, crossing.face);
            m.add_to(gen, col, sign);
        }
        col += 1;
    }
    for word in extra_words {
        for &(tet, face) in word {
            let (gen, sign) = spine.crossing(tet, face);
            m.add_to(gen, col, sign);
        }
        col += 1;
    }
    m
}

fn cokernel(m: &IntMatrix) -> AbelianGroup {
    let snf = smith_normal_form(m);
    AbelianGroup {
        rank: m.rows() - snf.rank,
        torsion: snf
            .diagonal()
            .into_iter()
            .filter(|d| *d > BigInt::from(1))
            .collect(),
    }
}

/// `H₁(M; ℤ)` from the abelianized dual-spine presentation.
pub fn h1_manifold(tri: &Triangulation) -> AbelianGroup {
    let spine = DualSpine::new(tri);
    cokernel(&relation_matrix(tri, &spine, &[]))
}

/// `H₁(M̂; ℤ)` where every boundary component is collapsed to a point:
/// the dual-spine presentation extended by the face-crossing words of a
/// basis of each peripheral `H₁` (killing the peripheral image). Each word
/// is a sequence of `(tet, exit_face)` crossings of a closed curve.
pub fn mhat_homology(tri: &Triangulation, peripheral_words: &[Vec<(usize, u8)>]) -> AbelianGroup {
    let spine = DualSpine::new(tri);
    cokernel(&relation_matrix(tri, &spine, peripheral_words))
}
