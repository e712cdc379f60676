//! Sparse arbitrary-precision integer matrices and Smith normal form.
//!
//! Matrices are stored as sorted triplets (a `BTreeMap` keyed by
//! `(row, col)`), which keeps every export and iteration deterministic.
//! Smith normal form works on a dense copy; pivoting picks the entry of
//! smallest nonzero absolute value to limit entry growth (arbitrary precision
//! makes this a performance choice, not a correctness one).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Errors for matrix operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    DimensionMismatch,
}

/// A sparse integer matrix with arbitrary-precision entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn set<T: Into<BigInt>>(&mut self, r: usize, c: usize, value: T) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        let value = value.into();
        if value.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), value);
        }
    }

    pub fn add_to<T: Into<BigInt>>(&mut self, r: usize, c: usize, value: T) {
        let sum = self.get(r, c) + value.into();
        self.set(r, c, sum);
    }

    /// Sorted `(row, col, value)` triplets.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for (r, c, v) in self.triplets() {
            out.set(c, r, v.clone());
        }
        out
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch);
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        // Group the right factor by row for the sparse product.
        let mut rows_of_other: BTreeMap<usize, Vec<(usize, &BigInt)>> = BTreeMap::new();
        for (r, c, v) in other.triplets() {
            rows_of_other.entry(r).or_default().push((c, v));
        }
        for (r, k, v) in self.triplets() {
            if let Some(row) = rows_of_other.get(&k) {
                for &(c, w) in row {
                    out.add_to(r, c, v * w);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>, MatrixError> {
        if x.len() != self.cols {
            return Err(MatrixError::DimensionMismatch);
        }
        let mut out = alloc::vec![BigInt::zero(); self.rows];
        for (r, c, v) in self.triplets() {
            out[r] += v * &x[c];
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut dense = alloc::vec![alloc::vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            dense[r][c] = v.clone();
        }
        dense
    }

    pub fn from_dense(dense: &[Vec<BigInt>], rows: usize, cols: usize) -> IntMatrix {
        let mut m = IntMatrix::zero(rows, cols);
        for (r, row) in dense.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.set(r, c, v.clone());
                }
            }
        }
        m
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.rows != other.rows {
            return Err(MatrixError::DimensionMismatch);
        }
        let mut out = IntMatrix::zero(self.rows, self.cols + other.cols);
        for (r, c, v) in self.triplets() {
            out.set(r, c, v.clone());
        }
        for (r, c, v) in other.triplets() {
            out.set(r, self.cols + c, v.clone());
        }
        Ok(out)
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vcat(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch);
        }
        let mut out = IntMatrix::zero(self.rows + other.rows, self.cols);
        for (r, c, v) in self.triplets() {
            out.set(r, c, v.clone());
        }
        for (r, c, v) in other.triplets() {
            out.set(self.rows + r, c, v.clone());
        }
        Ok(out)
    }

    /// Row `r` as a dense vector.
    pub fn row(&self, r: usize) -> Vec<BigInt> {
        let mut out = alloc::vec![BigInt::zero(); self.cols];
        for (&(rr, c), v) in self.entries.range((r, 0)..=(r, self.cols.max(1) - 1)) {
            debug_assert_eq!(rr, r);
            out[c] = v.clone();
        }
        out
    }

    /// Column `c` as a dense vector.
    pub fn col(&self, c: usize) -> Vec<BigInt> {
        let mut out = alloc::vec![BigInt::zero(); self.rows];
        for (r, cc, v) in self.triplets() {
            if cc == c {
                out[r] = v.clone();
            }
        }
        out
    }
}

/// The Smith normal form `U·M·V = D` of `M`, with unimodular `U`, `V` and a
/// diagonal `D` whose nonnegative entries satisfy `d₁ | d₂ | …`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v` (tracked during elimination; used for kernel
    /// coordinates).
    pub v_inv: IntMatrix,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl Snf {
    /// The nonzero diagonal entries `d₁ | d₂ | …`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i)).collect()
    }
}

/// Computes the Smith normal form of `m`.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.to_dense();
    let mut u = IntMatrix::identity(rows).to_dense();
    let mut v = IntMatrix::identity(cols).to_dense();
    let mut v_inv = IntMatrix::identity(cols).to_dense();

    let mut k = 0usize;
    while k < rows && k < cols {
        // Pivot: smallest nonzero absolute value in the trailing submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for r in k..rows {
            for c in k..cols {
                if !a[r][c].is_zero()
                    && pivot
                        .map(|(pr, pc)| a[r][c].abs() < a[pr][pc].abs())
                        .unwrap_or(true)
                {
                    pivot = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        swap_rows(&mut a, &mut u, k, pr);
        swap_cols(&mut a, &mut v, &mut v_inv, k, pc);

        loop {
            let mut dirty = false;
            // Clear column k below/above the pivot.
            for r in 0..rows {
                if r == k || a[r][k].is_zero() {
                    continue;
                }
                let q = div_round(&a[r][k], &a[k][k]);
                if !q.is_zero() {
                    row_op(&mut a, &mut u, r, k, &q);
                }
                if !a[r][k].is_zero() {
                    // Remainder left: swap it into the pivot and start over.
                    swap_rows(&mut a, &mut u, k, r);
                    dirty = true;
                }
            }
            // Clear row k.
            for c in 0..cols {
                if c == k || a[k][c].is_zero() {
                    continue;
                }
                let q = div_round(&a[k][c], &a[k][k]);
                if !q.is_zero() {
                    col_op(&mut a, &mut v, &mut v_inv, c, k, &q);
                }
                if !a[k][c].is_zero() {
                    swap_cols(&mut a, &mut v, &mut v_inv, k, c);
                    dirty = true;
                }
            }
            if !dirty && (0..rows).all(|r| r == k || a[r][k].is_zero()) {
                break;
            }
        }

        // Make the pivot divide the whole trailing submatrix: if some entry
        // resists, fold its row into row k and re-clear.
        let mut offender = None;
        'scan: for r in (k + 1)..rows {
            for c in (k + 1)..cols {
                if !(&a[r][c] % &a[k][k]).is_zero() {
                    offender = Some(r);
                    break 'scan;
                }
            }
        }
        if let Some(r) = offender {
            // row_k += row_r, then repeat this pivot position.
            let one = BigInt::from(-1);
            row_op(&mut a, &mut u, k, r, &one);
            continue;
        }

        if a[k][k].is_negative() {
            negate_row(&mut a, &mut u, k);
        }
        k += 1;
    }

    let rank = (0..k).take_while(|&i| !a[i][i].is_zero()).count();
    Snf {
        d: IntMatrix::from_dense(&a, rows, cols),
        u: IntMatrix::from_dense(&u, rows, rows),
        v: IntMatrix::from_dense(&v, cols, cols),
        v_inv: IntMatrix::from_dense(&v_inv, cols, cols),
        rank,
    }
}

/// Rank over ℤ (= rank over ℚ).
pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank
}

/// Decides whether `x ∈ Im(M)` over ℤ; returns a preimage when it is.
pub fn image_membership(m: &IntMatrix, x: &[BigInt]) -> Result<Option<Vec<BigInt>>, MatrixError> {
    if x.len() != m.rows() {
        return Err(MatrixError::DimensionMismatch);
    }
    let snf = smith_normal_form(m);
    let y = snf.u.mul_vec(x)?;
    let mut z = alloc::vec![BigInt::zero(); m.cols()];
    for (i, yi) in y.iter().enumerate() {
        if i < snf.rank {
            let d = snf.d.get(i, i);
            let (q, r) = yi.div_rem(&d);
            if !r.is_zero() {
                return Ok(None);
            }
            z[i] = q;
        } else if !yi.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(snf.v.mul_vec(&z)?))
}

// --- dense elimination helpers ----------------------------------------------

fn swap_rows(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i != j {
        a.swap(i, j);
        u.swap(i, j);
    }
}

fn swap_cols(
    a: &mut [Vec<BigInt>],
    v: &mut [Vec<BigInt>],
    v_inv: &mut [Vec<BigInt>],
    i: usize,
    j: usize,
) {
    if i == j {
        return;
    }
    for row in a.iter_mut() {
        row.swap(i, j);
    }
    for row in v.iter_mut() {
        row.swap(i, j);
    }
    // (M·S)⁻¹ = S⁻¹·M⁻¹ and a swap is its own inverse: swap rows of v_inv.
    v_inv.swap(i, j);
}

/// `row_i -= q·row_j` on `a` and `u`.
fn row_op(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    for c in 0..a[i].len() {
        let t = &a[j][c] * q;
        a[i][c] -= t;
    }
    for c in 0..u[i].len() {
        let t = &u[j][c] * q;
        u[i][c] -= t;
    }
}

/// `col_i -= q·col_j` on `a` and `v`; the inverse op (`row_j += q·row_i`) on
/// `v_inv`.
fn col_op(
    a: &mut [Vec<BigInt>],
    v: &mut [Vec<BigInt>],
    v_inv: &mut [Vec<BigInt>],
    i: usize,
    j: usize,
    q: &BigInt,
) {
    for row in a.iter_mut() {
        let t = &row[j] * q;
        row[i] -= t;
    }
    for row in v.iter_mut() {
        let t = &row[j] * q;
        row[i] -= t;
    }
    let (src_row, dst_row) = if i < j {
        let (left, right) = v_inv.split_at_mut(j);
        (&left[i], &mut right[0])
    } else {
        let (left, right) = v_inv.split_at_mut(i);
        (&right[0], &mut left[j])
    };
    for (dst, src) in dst_row.iter_mut().zip(src_row.iter()) {
        *dst += src * q;
    }
}

fn negate_row(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], i: usize) {
    for x in a[i].iter_mut() {
        let t = -&*x;
        *x = t;
    }
    for x in u[i].iter_mut() {
        let t = -&*x;
        *x = t;
    }
}

/// Rounded division minimizing the remainder's absolute value.
fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_rem(d);
    // Adjust so |n - q·d| ≤ |d|/2 (not required for correctness, limits growth).
    let two_r: BigInt = &r * 2;
    if two_r.abs() > d.abs() {
        if (r.is_negative()) == (d.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}
