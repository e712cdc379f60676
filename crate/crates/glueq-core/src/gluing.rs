//! Gluing equations: exponent matrices over the shape parameters, the
//! log-reduced system `∏ z^A (1−z)^B = ε`, and exact/numeric evaluation.
//!
//! Columns are indexed by `(tetrahedron, subsimplex)` in [`JBasis`] column
//! order (tetrahedron-major, subsimplices lexicographic); rows by non-vertex
//! integral point classes in [`PointClasses`] order. Each subsimplex carries
//! one independent shape `z` (attached to the edge pair `ε₀₁/ε₂₃`), with
//! `z′ = 1/(1−z)` on `ε₁₂/ε₀₃` and `z″ = 1 − 1/z` on `ε₀₂/ε₁₃`, so that
//! `z·z′·z″ = −1`.

use alloc::vec::Vec;

use num_complex::Complex;
use num_traits::ToPrimitive;

use crate::jcomplex::JBasis;
use crate::lattice::{
    classify_point, lattice_points, midpoint_pairs, pair_class, EdgePairClass, LatticeError,
    Point, PointClasses, PointKind,
};
use crate::matrix::{IntMatrix, MatrixError};

pub type C64 = Complex<f64>;

/// Shapes closer than this to the degenerate values `0` and `1` are rejected.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Errors for gluing-system construction and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum GluingError {
    /// A shape parameter is within [`DEGENERATE_TOL`] of `0` or `1`.
    DegenerateShape { column: usize },
    /// Wrong number of shape values for `(tet_count, n)`.
    WrongShapeCount { expected: usize, got: usize },
    /// Face points require `n ≥ 3`.
    InvalidN,
    Lattice(LatticeError),
    Matrix(MatrixError),
}

impl From<LatticeError> for GluingError {
    fn from(e: LatticeError) -> Self {
        GluingError::Lattice(e)
    }
}

impl From<MatrixError> for GluingError {
    fn from(e: MatrixError) -> Self {
        GluingError::Matrix(e)
    }
}

/// Unreduced midpoint-incidence counts: `A′` on the `ε₀₁/ε₂₃` pair, `B′` on
/// `ε₁₂/ε₀₃`, `C′` on `ε₀₂/ε₁₃`. All entries are nonnegative.
#[derive(Debug, Clone)]
pub struct ExponentMatrices {
    pub a_prime: IntMatrix,
    pub b_prime: IntMatrix,
    pub c_prime: IntMatrix,
}

/// Builds the unreduced exponents: every midpoint decomposition `s + e = t`
/// of every member `(t, Δ)` of a class adds 1 to the matrix of `e`'s pair
/// class at `(class, (Δ, s))`.
pub fn exponent_matrices(basis: &JBasis, classes: &PointClasses) -> ExponentMatrices {
    let cols = basis.columns();
    let mut a_prime = IntMatrix::zero(classes.p(), cols);
    let mut b_prime = IntMatrix::zero(classes.p(), cols);
    let mut c_prime = IntMatrix::zero(classes.p(), cols);
    for (p, class) in classes.classes.iter().enumerate() {
        for &(tet, t) in &class.members {
            for (s, (i, j)) in midpoint_pairs(t).expect("non-vertex member") {
                let col = basis.column(tet, s);
                match pair_class(i, j) {
                    EdgePairClass::E01_23 => a_prime.add_to(p, col, 1),
                    EdgePairClass::E12_03 => b_prime.add_to(p, col, 1),
                    EdgePairClass::E02_13 => c_prime.add_to(p, col, 1),
                }
            }
        }
    }
    ExponentMatrices {
        a_prime,
        b_prime,
        c_prime,
    }
}

/// One block of log-reduced equations `∏ z^A (1−z)^B = ε` (edge rows or
/// peripheral-curve rows).
#[derive(Debug, Clone)]
pub struct EquationBlock {
    pub a: IntMatrix,
    pub b: IntMatrix,
    /// Right-hand sign per row, `+1` or `−1`.
    pub eps: Vec<i8>,
}

impl EquationBlock {
    /// The row as a `J`-coordinate vector `(a-half | −b-half)`. Folding the
    /// midpoint sum through `ε₀₂ = −ε₀₁ − ε₁₂` gives the `(s, ε₁₂)`
    /// coefficient `B′ − C′ = −B`, so the `b`-half flips sign relative to
    /// the equation exponents (which use `1−z`, not `z′`).
    pub fn j_row(&self, p: usize) -> Vec<num_bigint::BigInt> {
        let mut out = self.a.row(p);
        out.extend(self.b.row(p).into_iter().map(|x| -x));
        out
    }
}

/// The gluing system: edge-equation block plus (once cusp data is attached)
/// the peripheral block.
#[derive(Debug, Clone)]
pub struct GluingSystem {
    pub edges: EquationBlock,
    /// Peripheral equations, rows indexed by (curve, level r); attached by
    /// the cusp machinery.
    pub cusp: Option<EquationBlock>,
}

/// Reduces `∏ z^{A′} z′^{B′} z″^{C′} = 1` to `∏ z^A (1−z)^B = ε` via
/// `z′ = (1−z)^{−1}` and `z″ = −(1−z)·z^{−1}`:
/// `A = A′ − C′`, `B = C′ − B′`, `ε = (−1)^{Σ row of C′}`.
pub fn log_reduce(exp: &ExponentMatrices) -> GluingSystem {
    let rows = exp.a_prime.rows();
    let mut a = exp.a_prime.clone();
    let mut b = IntMatrix::zero(rows, exp.a_prime.cols());
    let mut eps = Vec::with_capacity(rows);
    for (r, c, v) in exp.c_prime.triplets() {
        a.add_to(r, c, -v.clone());
        b.add_to(r, c, v.clone());
    }
    for (r, c, v) in exp.b_prime.triplets() {
        b.add_to(r, c, -v.clone());
    }
    for r in 0..rows {
        let c_sum: num_bigint::BigInt = exp.c_prime.row(r).into_iter().sum();
        eps.push(if (c_sum % 2u8).to_i64() == Some(0) { 1 } else { -1 });
    }
    let edges = EquationBlock { a, b, eps };
    debug_assert!(
        sign_convention_holds(exp, &edges),
        "ε = (−1)^ΣC′ must reproduce the unreduced product at z = 2"
    );
    GluingSystem { edges, cusp: None }
}

/// Cross-checks the reduction at the rational point `z = 2` (`z′ = −1`,
/// `z″ = 1/2`, `1 − z = −1`), where both sides are exact powers of 2 up to
/// sign.
fn sign_convention_holds(exp: &ExponentMatrices, blk: &EquationBlock) -> bool {
    for r in 0..blk.a.rows() {
        let (mut la, mut lb, mut lc) = (0i64, 0i64, 0i64);
        for c in 0..blk.a.cols() {
            la += exp.a_prime.get(r, c).to_i64().unwrap();
            lb += exp.b_prime.get(r, c).to_i64().unwrap();
            lc += exp.c_prime.get(r, c).to_i64().unwrap();
        }
        // Unreduced: 2^{ΣA′} (−1)^{ΣB′} (1/2)^{ΣC′};
        // reduced: ε (−1)^{ΣB} 2^{ΣA}. Compare exponent and sign.
        let a_sum: i64 = (0..blk.a.cols())
            .map(|c| blk.a.get(r, c).to_i64().unwrap())
            .sum();
        let b_sum: i64 = (0..blk.b.cols())
            .map(|c| blk.b.get(r, c).to_i64().unwrap())
            .sum();
        let lhs_sign = if lb % 2 == 0 { 1 } else { -1 };
        let rhs_sign = i64::from(blk.eps[r]) * if b_sum % 2 == 0 { 1 } else { -1 };
        if la - lc != a_sum || lhs_sign != rhs_sign {
            return false;
        }
    }
    true
}

/// A full nondegenerate shape assignment: one `z` per `(tet, subsimplex)`
/// column, with `z′` and `z″` derived on demand.
#[derive(Debug, Clone)]
pub struct ShapeAssignment {
    pub n: i64,
    pub tet_count: usize,
    /// `z` values in column order.
    pub z: Vec<C64>,
}

fn is_degenerate(z: C64) -> bool {
    let tol2 = DEGENERATE_TOL * DEGENERATE_TOL;
    z.norm_sqr() < tol2 || (C64::new(1.0, 0.0) - z).norm_sqr() < tol2
}

/// Validates and wraps raw `z` values (column order) into a full assignment.
pub fn extend_shapes(raw: &[C64], tet_count: usize, n: i64) -> Result<ShapeAssignment, GluingError> {
    let subs = crate::lattice::subsimplices(n)?.len();
    let expected = tet_count * subs;
    if raw.len() != expected {
        return Err(GluingError::WrongShapeCount {
            expected,
            got: raw.len(),
        });
    }
    for (column, &z) in raw.iter().enumerate() {
        if is_degenerate(z) {
            return Err(GluingError::DegenerateShape { column });
        }
    }
    Ok(ShapeAssignment {
        n,
        tet_count,
        z: raw.to_vec(),
    })
}

impl ShapeAssignment {
    pub fn z(&self, column: usize) -> C64 {
        self.z[column]
    }

    /// `z′ = 1/(1−z)`.
    pub fn z_prime(&self, column: usize) -> C64 {
        (C64::new(1.0, 0.0) - self.z[column]).inv()
    }

    /// `z″ = 1 − 1/z`.
    pub fn z_double_prime(&self, column: usize) -> C64 {
        C64::new(1.0, 0.0) - self.z[column].inv()
    }

    /// The shape on edge `{i, j}` of the subsimplex at `column`.
    pub fn edge_shape(&self, column: usize, i: u8, j: u8) -> C64 {
        match pair_class(i, j) {
            EdgePairClass::E01_23 => self.z(column),
            EdgePairClass::E12_03 => self.z_prime(column),
            EdgePairClass::E02_13 => self.z_double_prime(column),
        }
    }
}

/// `base^exp` for integer `exp` by repeated squaring. The exponents arising
/// here are midpoint-incidence counts (bounded by a small multiple of `n`),
/// so no renormalization is needed at f64 scale.
pub fn cpow(base: C64, exp: i64) -> C64 {
    let b = if exp < 0 { base.inv() } else { base };
    let mut e = exp.unsigned_abs();
    let mut acc = C64::new(1.0, 0.0);
    let mut sq = b;
    while e > 0 {
        if e & 1 == 1 {
            acc *= sq;
        }
        sq *= sq;
        e >>= 1;
    }
    acc
}

/// Residuals `∏ z^A (1−z)^B / ε` per row; every residual is `1` exactly when
/// the equations hold.
pub fn evaluate_block(blk: &EquationBlock, z: &ShapeAssignment) -> Result<Vec<C64>, GluingError> {
    if blk.a.cols() != z.z.len() {
        return Err(GluingError::Matrix(MatrixError::DimensionMismatch));
    }
    for (column, &zz) in z.z.iter().enumerate() {
        if is_degenerate(zz) {
            return Err(GluingError::DegenerateShape { column });
        }
    }
    let one = C64::new(1.0, 0.0);
    let mut out = alloc::vec![one; blk.a.rows()];
    for (r, c, v) in blk.a.triplets() {
        out[r] *= cpow(z.z(c), v.to_i64().expect("small exponent"));
    }
    for (r, c, v) in blk.b.triplets() {
        out[r] *= cpow(one - z.z(c), v.to_i64().expect("small exponent"));
    }
    for (r, res) in out.iter_mut().enumerate() {
        *res *= f64::from(blk.eps[r]); // ε ∈ {±1}, so division is multiplication
    }
    Ok(out)
}

/// Residuals of the unreduced form `∏ z^{A′} z′^{B′} z″^{C′}` (target `1`).
pub fn evaluate_unreduced(
    exp: &ExponentMatrices,
    z: &ShapeAssignment,
) -> Result<Vec<C64>, GluingError> {
    if exp.a_prime.cols() != z.z.len() {
        return Err(GluingError::Matrix(MatrixError::DimensionMismatch));
    }
    let mut out = alloc::vec![C64::new(1.0, 0.0); exp.a_prime.rows()];
    for (r, c, v) in exp.a_prime.triplets() {
        out[r] *= cpow(z.z(c), v.to_i64().expect("small exponent"));
    }
    for (r, c, v) in exp.b_prime.triplets() {
        out[r] *= cpow(z.z_prime(c), v.to_i64().expect("small exponent"));
    }
    for (r, c, v) in exp.c_prime.triplets() {
        out[r] *= cpow(z.z_double_prime(c), v.to_i64().expect("small exponent"));
    }
    Ok(out)
}

/// The face-point coordinates `X_t = −∏_{s+e=t} z^e_s` for every face point
/// of every tetrahedron. For a glued face-point class the two members are
/// both reported; their product is the residual of the class equation.
pub fn x_coordinates(z: &ShapeAssignment) -> Result<Vec<(usize, Point, C64)>, GluingError> {
    if z.n < 3 {
        return Err(GluingError::InvalidN);
    }
    let basis = JBasis::new(z.tet_count, z.n)?;
    let mut out = Vec::new();
    for tet in 0..z.tet_count {
        for t in lattice_points(z.n)? {
            if classify_point(t).0 != PointKind::Face {
                continue;
            }
            let mut x = C64::new(-1.0, 0.0);
            for (s, (i, j)) in midpoint_pairs(t)? {
                x *= z.edge_shape(basis.column(tet, s), i, j);
            }
            out.push((tet, t, x));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jcomplex::JComplex;
    use crate::search::for_each_triangulation;
    use crate::triangulation::Triangulation;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm_sqr() <= tol * tol * b.norm_sqr().max(1.0)
    }

    /// First 2-tetrahedron cusped triangulation in enumeration order.
    fn cusped_two_tet() -> Triangulation {
        let mut found = None;
        for_each_triangulation(2, &mut |tri| {
            if matches!(tri.boundary_profile(), Ok(bp) if bp.c > 0) {
                found = Some(tri.clone());
                false
            } else {
                true
            }
        });
        found.expect("a cusped 2-tetrahedron triangulation exists")
    }

    #[test]
    fn shape_triple() {
        let z = ShapeAssignment {
            n: 2,
            tet_count: 1,
            z: alloc::vec![C64::new(2.0, 0.0)],
        };
        assert!(close(z.z_prime(0), C64::new(-1.0, 0.0), 1e-14));
        assert!(close(z.z_double_prime(0), C64::new(0.5, 0.0), 1e-14));
        assert!(close(
            z.z(0) * z.z_prime(0) * z.z_double_prime(0),
            C64::new(-1.0, 0.0),
            1e-14
        ));
        // The regular shape is a fixed point of z ↦ 1/(1−z).
        let reg = C64::new(0.5, 0.75f64.sqrt());
        let z = ShapeAssignment {
            n: 2,
            tet_count: 1,
            z: alloc::vec![reg],
        };
        assert!(close(z.z_prime(0), reg, 1e-14));
        assert!(close(z.z_double_prime(0), reg, 1e-14));
    }

    #[test]
    fn degenerate_rejected() {
        assert!(matches!(
            extend_shapes(&[C64::new(1.0, 1e-13)], 1, 2),
            Err(GluingError::DegenerateShape { column: 0 })
        ));
        assert!(matches!(
            extend_shapes(&[C64::new(2.0, 0.0); 3], 1, 2),
            Err(GluingError::WrongShapeCount {
                expected: 1,
                got: 3
            })
        ));
    }

    #[test]
    fn single_c_prime_row_reduces_to_sign() {
        // z″ = −(1−z)/z: A row −1, B row +1, ε = −1.
        let mut c_prime = IntMatrix::zero(1, 1);
        c_prime.set(0, 0, 1);
        let exp = ExponentMatrices {
            a_prime: IntMatrix::zero(1, 1),
            b_prime: IntMatrix::zero(1, 1),
            c_prime,
        };
        let sys = log_reduce(&exp);
        assert_eq!(sys.edges.a.get(0, 0), (-1).into());
        assert_eq!(sys.edges.b.get(0, 0), 1.into());
        assert_eq!(sys.edges.eps, alloc::vec![-1]);
    }

    #[test]
    fn reduced_matches_unreduced_and_beta() {
        let tri = cusped_two_tet();
        for n in 2..=3i64 {
            let jc = JComplex::new(&tri, n).unwrap();
            let exp = exponent_matrices(&jc.basis, &jc.classes);
            // Total incidence: A′+B′+C′ row sums count all midpoints of all
            // members (6/3/1 per interior/face/edge member).
            for (p, class) in jc.classes.classes.iter().enumerate() {
                let want: usize = class
                    .members
                    .iter()
                    .map(|&(_, t)| midpoint_pairs(t).unwrap().len())
                    .sum();
                let got: num_bigint::BigInt = (0..exp.a_prime.cols())
                    .map(|c| {
                        exp.a_prime.get(p, c) + exp.b_prime.get(p, c) + exp.c_prime.get(p, c)
                    })
                    .sum();
                assert_eq!(got, want.into());
            }
            let sys = log_reduce(&exp);
            // Row p of (A | −B) is column p of β.
            for p in 0..jc.classes.p() {
                assert_eq!(sys.edges.j_row(p), jc.beta.col(p), "β column {p} at n={n}");
            }
            // Deterministic nondegenerate shapes, two evaluation routes.
            let cols = jc.basis.columns();
            let raw: Vec<C64> = (0..cols)
                .map(|k| C64::new(0.3 + 0.11 * k as f64, 0.7 - 0.05 * k as f64))
                .collect();
            let z = extend_shapes(&raw, tri.tet_count(), n).unwrap();
            let red = evaluate_block(&sys.edges, &z).unwrap();
            let unred = evaluate_unreduced(&exp, &z).unwrap();
            // ∏ z^{A′} z′^{B′} z″^{C′} = ε·∏ z^A (1−z)^B, and evaluate_block
            // already divides by ε, so the two residuals agree exactly.
            for (r, (&x, &y)) in red.iter().zip(unred.iter()).enumerate() {
                assert!(close(x, y, 1e-10), "row {r} at n={n}");
            }
        }
    }

    #[test]
    fn x_coordinate_face_consistency() {
        let tri = cusped_two_tet();
        let n = 3i64;
        let jc = JComplex::new(&tri, n).unwrap();
        let cols = jc.basis.columns();
        let raw: Vec<C64> = (0..cols)
            .map(|k| C64::new(1.3 + 0.21 * k as f64, -0.4 + 0.09 * k as f64))
            .collect();
        let z = extend_shapes(&raw, tri.tet_count(), n).unwrap();
        let xs = x_coordinates(&z).unwrap();
        let exp = exponent_matrices(&jc.basis, &jc.classes);
        let sys = log_reduce(&exp);
        let res = evaluate_block(&sys.edges, &z).unwrap();
        // For a glued face-point class {(t₁,Δ₁),(t₂,Δ₂)}: X₁·X₂ equals the
        // unreduced product, i.e. the residual (and 1 when satisfied).
        for (p, class) in jc.classes.classes.iter().enumerate() {
            if class.kind != PointKind::Face {
                continue;
            }
            assert_eq!(class.members.len(), 2);
            let prod: C64 = class
                .members
                .iter()
                .map(|&(tet, t)| {
                    xs.iter()
                        .find(|&&(tt, pt, _)| tt == tet && pt == t)
                        .unwrap()
                        .2
                })
                .product();
            assert!(close(prod, res[p], 1e-10), "face class {p}");
        }
        // All-regular shapes at n=3: X_t = −z·z′·z″ with all three equal the
        // primitive sixth root, so X_t = −z³ = 1.
        let reg = C64::new(0.5, 0.75f64.sqrt());
        let z = extend_shapes(&alloc::vec![reg; cols], tri.tet_count(), n).unwrap();
        for (_, _, x) in x_coordinates(&z).unwrap() {
            assert!(close(x, C64::new(1.0, 0.0), 1e-12));
        }
    }
}
