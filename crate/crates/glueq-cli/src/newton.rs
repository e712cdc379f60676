//! Least-squares Newton solver for the multiplicative equation system.
//!
//! Used as the committed oracle producing complete-structure shape
//! assignments: stack the edge block and the peripheral block and minimize
//! `Σ |residual_p − 1|²` over the shape vector. The system is typically
//! overdetermined; each step solves the normal equations `JᴴJ·Δ = Jᴴf` of the
//! complex Jacobian by Gaussian elimination.

use anyhow::{anyhow, bail, Result};
use glueq_core::gluing::{evaluate_block, extend_shapes, C64, EquationBlock};
use num_traits::ToPrimitive;

/// Residual target: `max_p |residual_p − 1| < CONVERGED` stops the iteration.
pub const CONVERGED: f64 = 1e-13;

/// The committed generic starting value (one per column): well inside the
/// upper half plane and away from the degenerate points `0`, `1`.
pub const DEFAULT_START: C64 = C64::new(0.45, 0.85);

/// Runs Newton on the stacked blocks from `start` (one value per column).
/// Returns the shape vector when `max |residual − 1|` drops below
/// [`CONVERGED`] within `max_iter` steps.
pub fn newton_solve(
    blocks: &[&EquationBlock],
    tet_count: usize,
    n: i64,
    start: &[C64],
    max_iter: usize,
) -> Result<Vec<C64>> {
    if blocks.is_empty() {
        bail!("no equation blocks");
    }
    let cols = blocks[0].a.cols();
    if start.len() != cols {
        bail!("start vector has {} entries for {cols} columns", start.len());
    }
    let mut z: Vec<C64> = start.to_vec();
    for _ in 0..max_iter {
        let shapes = extend_shapes(&z, tet_count, n).map_err(|e| anyhow!("{e:?}"))?;
        let mut f: Vec<C64> = Vec::new();
        let mut jac: Vec<Vec<C64>> = Vec::new();
        for blk in blocks {
            let residuals = evaluate_block(blk, &shapes).map_err(|e| anyhow!("{e:?}"))?;
            for (row, res) in residuals.iter().enumerate() {
                f.push(res - C64::new(1.0, 0.0));
                // d residual / d z_j = residual · (A/z_j − B/(1−z_j)).
                let mut grad = vec![C64::new(0.0, 0.0); cols];
                for j in 0..cols {
                    let a = blk.a.get(row, j).to_i64().expect("small exponent") as f64;
                    let b = blk.b.get(row, j).to_i64().expect("small exponent") as f64;
                    if a != 0.0 {
                        grad[j] += res * a / z[j];
                    }
                    if b != 0.0 {
                        grad[j] -= res * b / (C64::new(1.0, 0.0) - z[j]);
                    }
                }
                jac.push(grad);
            }
        }
        let worst = f.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        if worst < CONVERGED {
            return Ok(z);
        }
        // Normal equations JᴴJ·Δ = Jᴴf.
        let mut h = vec![vec![C64::new(0.0, 0.0); cols]; cols];
        let mut g = vec![C64::new(0.0, 0.0); cols];
        for (row, grad) in jac.iter().enumerate() {
            for i in 0..cols {
                let ci = grad[i].conj();
                for (j, hij) in h[i].iter_mut().enumerate() {
                    *hij += ci * grad[j];
                }
                g[i] += ci * f[row];
            }
        }
        let step = solve_dense(&mut h, &mut g)?;
        for (zj, dj) in z.iter_mut().zip(&step) {
            *zj -= dj;
        }
    }
    bail!("Newton iteration did not converge within {max_iter} steps")
}

/// Gaussian elimination with partial pivoting for a small dense complex
/// system; consumes its inputs.
fn solve_dense(a: &mut [Vec<C64>], b: &mut [C64]) -> Result<Vec<C64>> {
    let m = b.len();
    for k in 0..m {
        let pivot = (k..m)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .unwrap();
        if a[pivot][k].norm() < 1e-300 {
            bail!("singular normal equations");
        }
        a.swap(k, pivot);
        b.swap(k, pivot);
        let (upper, lower) = a.split_at_mut(k + 1);
        let row_k = &upper[k];
        let bk = b[k];
        for (off, row_i) in lower.iter_mut().enumerate() {
            let factor = row_i[k] / row_k[k];
            for (x, &y) in row_i[k..].iter_mut().zip(&row_k[k..]) {
                *x -= factor * y;
            }
            b[k + 1 + off] -= factor * bk;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); m];
    for k in (0..m).rev() {
        let mut acc = b[k];
        for j in k + 1..m {
            acc -= a[k][j] * x[j];
        }
        x[k] = acc / a[k][k];
    }
    Ok(x)
}
