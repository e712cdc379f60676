//! Validated oriented ideal triangulations: face pairings, cell classes, and
//! boundary (link) profiles.
//!
//! A triangulation is a set of tetrahedra `0..t`, each with four faces
//! (face `f` is opposite vertex `f`), every face glued to a face of some
//! tetrahedron by a permutation of the vertex labels. Conventions:
//!
//! * the permutation stored at `(Δ, f)` sends vertex labels of `Δ` to vertex
//!   labels of the neighbor, and sends `f` to the glued face index there;
//! * every tetrahedron carries the positive orientation of the standard
//!   ordered simplex, so orientation compatibility forces every gluing
//!   permutation to be odd; even permutations are rejected.

use alloc::string::String;
use alloc::vec::Vec;

use crate::perm::{self, Perm};
use crate::unionfind::UnionFind;

/// One face pairing: the neighboring tetrahedron and the vertex-label
/// permutation into it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gluing {
    pub neighbor: usize,
    pub perm: Perm,
}

/// Validation and structural errors for triangulations and their boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriangulationError {
    /// Syntactically or structurally malformed input (bad permutation entries,
    /// neighbor index out of range, no tetrahedra, disconnected gluing graph).
    MalformedInput(String),
    /// Face `(tet, face)` has no gluing entry.
    UngluedFace { tet: usize, face: u8 },
    /// The pairing is not an involution at `(tet, face)`.
    InconsistentPairing { tet: usize, face: u8 },
    /// An even (orientation-incompatible) permutation at `(tet, face)`.
    NotOriented { tet: usize, face: u8 },
    /// The link of a vertex class is not connected (corrupt pairing data).
    DisconnectedLink { vertex_class: usize },
    /// A cusp operation was requested on a closed manifold.
    ClosedManifold,
}

impl core::fmt::Display for TriangulationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TriangulationError::MalformedInput(msg) => write!(f, "malformed input: {msg}"),
            TriangulationError::UngluedFace { tet, face } => {
                write!(f, "unglued face: tetrahedron {tet}, face {face}")
            }
            TriangulationError::InconsistentPairing { tet, face } => {
                write!(f, "inconsistent pairing at tetrahedron {tet}, face {face}")
            }
            TriangulationError::NotOriented { tet, face } => write!(
                f,
                "even gluing permutation at tetrahedron {tet}, face {face} (triangulation not oriented)"
            ),
            TriangulationError::DisconnectedLink { vertex_class } => {
                write!(f, "disconnected link for vertex class {vertex_class}")
            }
            TriangulationError::ClosedManifold => {
                write!(f, "operation requires ideal vertices, but the manifold is closed")
            }
        }
    }
}

/// The six unordered vertex pairs of a tetrahedron, in lexicographic order.
pub const EDGE_PAIRS: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index of the unordered pair `{i,j}` in [`EDGE_PAIRS`].
pub fn edge_pair_index(i: u8, j: u8) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    EDGE_PAIRS.iter().position(|&p| p == (a, b)).expect("distinct labels in 0..4")
}

/// A validated oriented ideal triangulation.
#[derive(Debug, Clone)]
pub struct Triangulation {
    gluings: Vec<[Gluing; 4]>,
}

/// Quotients of the tetrahedron cells under the pairing groupoid.
#[derive(Debug, Clone)]
pub struct CellClasses {
    /// Vertex classes: lists of `(tet, vertex)`.
    pub vertices: Vec<Vec<(usize, u8)>>,
    /// Edge classes: lists of `(tet, (i, j))` with `i < j`.
    pub edges: Vec<Vec<(usize, (u8, u8))>>,
    /// Face classes: lists of `(tet, face)`; always pairs, so `f = 2t`.
    pub faces: Vec<Vec<(usize, u8)>>,
}

impl CellClasses {
    pub fn v(&self) -> usize {
        self.vertices.len()
    }
    pub fn e(&self) -> usize {
        self.edges.len()
    }
    pub fn f(&self) -> usize {
        self.faces.len()
    }
}

/// One boundary (vertex-link) component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkComponent {
    /// Index into `CellClasses::vertices`.
    pub vertex_class: usize,
    pub euler_characteristic: i64,
    pub genus: usize,
}

/// Per-component link data plus the global counts used by the equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryProfile {
    /// One entry per vertex class (sphere links included, flagged by genus 0).
    pub components: Vec<LinkComponent>,
    /// Number of ideal components (links of genus ≥ 1).
    pub c: usize,
    /// Half the rank of H₁ of the boundary: the sum of the genera.
    pub h: usize,
}

impl Triangulation {
    /// Validates and constructs a triangulation from per-face gluing entries.
    /// `None` entries report [`TriangulationError::UngluedFace`].
    pub fn new(gluings: Vec<[Option<Gluing>; 4]>) -> Result<Self, TriangulationError> {
        if gluings.is_empty() {
            return Err(TriangulationError::MalformedInput(String::from(
                "no tetrahedra",
            )));
        }
        let t = gluings.len();
        let mut table: Vec<[Gluing; 4]> = Vec::with_capacity(t);
        for (tet, faces) in gluings.iter().enumerate() {
            let mut row = [Gluing { neighbor: 0, perm: perm::IDENTITY }; 4];
            for face in 0..4usize {
                let g = faces[face].ok_or(TriangulationError::UngluedFace {
                    tet,
                    face: face as u8,
                })?;
                if g.neighbor >= t {
                    return Err(TriangulationError::MalformedInput(alloc::format!(
                        "tetrahedron {tet}, face {face}: neighbor {} out of range",
                        g.neighbor
                    )));
                }
                if !perm::is_permutation(g.perm) {
                    return Err(TriangulationError::MalformedInput(alloc::format!(
                        "tetrahedron {tet}, face {face}: not a permutation"
                    )));
                }
                if !perm::is_odd(g.perm) {
                    return Err(TriangulationError::NotOriented {
                        tet,
                        face: face as u8,
                    });
                }
                row[face] = g;
            }
            table.push(row);
        }
        // Involution: the partner entry must point straight back with the
        // inverse permutation.
        for tet in 0..t {
            for face in 0..4usize {
                let g = table[tet][face];
                let back_face = g.perm[face] as usize;
                if g.neighbor == tet && back_face == face {
                    // A face folded onto itself is not a valid pairing.
                    return Err(TriangulationError::InconsistentPairing {
                        tet,
                        face: face as u8,
                    });
                }
                let back = table[g.neighbor][back_face];
                if back.neighbor != tet
                    || back.perm != perm::invert(g.perm)
                    || back.perm[back_face] as usize != face
                {
                    return Err(TriangulationError::InconsistentPairing {
                        tet,
                        face: face as u8,
                    });
                }
            }
        }
        // Connectivity of the gluing graph.
        let mut uf = UnionFind::new(t);
        for (tet, faces) in table.iter().enumerate() {
            for g in faces {
                uf.union(tet, g.neighbor);
            }
        }
        if uf.classes().len() != 1 {
            return Err(TriangulationError::MalformedInput(String::from(
                "gluing graph is disconnected",
            )));
        }
        Ok(Triangulation { gluings: table })
    }

    pub fn tet_count(&self) -> usize {
        self.gluings.len()
    }

    /// The gluing at face `face` of tetrahedron `tet`.
    pub fn gluing(&self, tet: usize, face: u8) -> Gluing {
        self.gluings[tet][face as usize]
    }

    /// Union-find quotients of vertices, edges, and faces.
    pub fn cell_classes(&self) -> CellClasses {
        let t = self.tet_count();

        // Vertices: key 4Δ + i; the gluing at face f identifies every i ≠ f.
        let mut vuf = UnionFind::new(4 * t);
        // Edges: key 6Δ + pair index.
        let mut euf = UnionFind::new(6 * t);
        // Faces: key 4Δ + f.
        let mut fuf = UnionFind::new(4 * t);

        for tet in 0..t {
            for face in 0..4u8 {
                let g = self.gluing(tet, face);
                fuf.union(4 * tet + face as usize, 4 * g.neighbor + g.perm[face as usize] as usize);
                for i in 0..4u8 {
                    if i == face {
                        continue;
                    }
                    vuf.union(4 * tet + i as usize, 4 * g.neighbor + g.perm[i as usize] as usize);
                }
                for (i, j) in EDGE_PAIRS {
                    if i == face || j == face {
                        continue;
                    }
                    let image = edge_pair_index(g.perm[i as usize], g.perm[j as usize]);
                    euf.union(6 * tet + edge_pair_index(i, j), 6 * g.neighbor + image);
                }
            }
        }

        let vertices = vuf
            .classes()
            .into_iter()
            .map(|c| c.into_iter().map(|k| (k / 4, (k % 4) as u8)).collect())
            .collect();
        let edges = euf
            .classes()
            .into_iter()
            .map(|c| c.into_iter().map(|k| (k / 6, EDGE_PAIRS[k % 6])).collect())
            .collect();
        let faces = fuf
            .classes()
            .into_iter()
            .map(|c| c.into_iter().map(|k| (k / 4, (k % 4) as u8)).collect())
            .collect();
        CellClasses { vertices, edges, faces }
    }

    /// Assembles the vertex-link surfaces and computes their Euler
    /// characteristics and genera.
    pub fn boundary_profile(&self) -> Result<BoundaryProfile, TriangulationError> {
        let t = self.tet_count();
        let classes = self.cell_classes();

        // Link triangles are (Δ, i); their corners (Δ, i, j), j ≠ i, are the
        // link vertices, identified by the gluings at the faces containing
        // the edge {i, j}. Key: 12Δ + 3i + (index of j among labels ≠ i).
        let corner_key = |tet: usize, i: u8, j: u8| -> usize {
            let slot = (0..4u8).filter(|&x| x != i).position(|x| x == j).unwrap();
            12 * tet + 3 * (i as usize) + slot
        };
        let mut cuf = UnionFind::new(12 * t);
        // Triangle connectivity within a link, via side gluings.
        let mut tuf = UnionFind::new(4 * t);
        for tet in 0..t {
            for face in 0..4u8 {
                let g = self.gluing(tet, face);
                for i in 0..4u8 {
                    if i == face {
                        continue;
                    }
                    tuf.union(4 * tet + i as usize, 4 * g.neighbor + g.perm[i as usize] as usize);
                    for j in 0..4u8 {
                        if j == i || j == face {
                            continue;
                        }
                        cuf.union(
                            corner_key(tet, i, j),
                            corner_key(g.neighbor, g.perm[i as usize], g.perm[j as usize]),
                        );
                    }
                }
            }
        }
        let corner_classes = cuf.classes().len();
        let _ = corner_classes;

        let mut components = Vec::new();
        let mut c = 0usize;
        let mut h = 0usize;
        for (idx, vclass) in classes.vertices.iter().enumerate() {
            // All triangles of this link must form one connected component.
            let root = tuf.find(4 * vclass[0].0 + vclass[0].1 as usize);
            for &(tet, i) in vclass {
                if tuf.find(4 * tet + i as usize) != root {
                    return Err(TriangulationError::DisconnectedLink { vertex_class: idx });
                }
            }
            let faces = vclass.len() as i64;
            let edges = 3 * faces / 2;
            // Count corner classes whose members all sit at this vertex class.
            let mut verts = 0i64;
            let mut seen = alloc::collections::BTreeSet::new();
            for &(tet, i) in vclass {
                for j in 0..4u8 {
                    if j == i {
                        continue;
                    }
                    let r = cuf.find(corner_key(tet, i, j));
                    if seen.insert(r) {
                        verts += 1;
                    }
                }
            }
            let chi = verts - edges + faces;
            debug_assert!(chi <= 2 && chi % 2 == 0, "closed orientable link");
            let genus = ((2 - chi) / 2) as usize;
            if genus >= 1 {
                c += 1;
                h += genus;
            }
            components.push(LinkComponent {
                vertex_class: idx,
                euler_characteristic: chi,
                genus,
            });
        }
        Ok(BoundaryProfile { components, c, h })
    }

    /// Errors with [`TriangulationError::ClosedManifold`] unless at least one
    /// vertex link is ideal (genus ≥ 1).
    pub fn require_cusped(&self) -> Result<BoundaryProfile, TriangulationError> {
        let profile = self.boundary_profile()?;
        if profile.c == 0 {
            return Err(TriangulationError::ClosedManifold);
        }
        Ok(profile)
    }
}
