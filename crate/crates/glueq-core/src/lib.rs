//! Exact combinatorics and integer linear algebra for the generalized
//! (PGL(n,ℂ)) gluing equations of oriented ideal triangulations.
//!
//! The crate is organized bottom-up:
//!
//! * [`perm`] / [`unionfind`] — small utilities (S₄ permutations, disjoint sets);
//! * [`triangulation`] — validated oriented ideal triangulations, cell classes,
//!   boundary profiles;
//! * [`lattice`] — integral points, subsimplices, and midpoint decompositions
//!   of the dilated tetrahedron Δ³ₙ, plus their quotient under face pairings;
//! * [`jcomplex`] — the chain complex C₀ → C₁ → J → C₁ → C₀ with the
//!   symplectic form Ω and the quad/hexagon/Stokes relation oracles;
//! * [`gluing`] — exponent matrices (A′,B′,C′), the reduced system (A|B) with
//!   signs, shape assignments, and equation evaluation;
//! * [`cusp`] — the three cellulations of the boundary, peripheral curves, the
//!   maps δ, δ′, γ, the intersection pairing ι, and the boundary cocycle;
//! * [`matrix`] / [`homology`] — sparse arbitrary-precision integer matrices,
//!   Smith normal form, and chain-complex homology;
//! * [`mhat`] — first homology of the space obtained by collapsing each
//!   boundary component, from the dual-spine presentation.
//!
//! Everything is exact integer arithmetic except shape evaluation, which uses
//! `f64` complex numbers with squared-norm comparisons (no `sqrt`/`ln`), so
//! the crate stays `no_std` (alloc only).

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cusp;
pub mod gluing;
pub mod homology;
pub mod jcomplex;
pub mod lattice;
pub mod matrix;
pub mod mhat;
pub mod perm;
pub mod search;
pub mod triangulation;
pub mod unionfind;

pub use triangulation::{BoundaryProfile, CellClasses, Gluing, Triangulation, TriangulationError};
