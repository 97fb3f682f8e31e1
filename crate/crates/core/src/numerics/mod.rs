//! Dense-matrix primitives shared by every other module: norms, symmetric
//! positive-definite solves and seeded random generation.

mod matrix;
pub mod rng;

pub use matrix::DenseMatrix;
pub use rng::{random_uniform_matrix, SeededRng};

use crate::error::{Error, Result};

/// Square root of the sum of squared entries.
pub fn frobenius_norm(a: &DenseMatrix) -> f64 {
    a.as_nalgebra().norm()
}

/// Sum over rows of the Euclidean row norm. Small values mean many rows are
/// close to zero.
pub fn l21_norm(a: &DenseMatrix) -> f64 {
    (0..a.rows()).map(|i| a.row_norm(i)).sum()
}

/// Solves `A·X = B` for symmetric positive-definite `A` by Cholesky
/// factorization.
///
/// Only the lower triangle of `A` is read. A nonpositive pivot is reported
/// as [`Error::NotPositiveDefinite`]; callers recover by increasing their
/// ridge term; no regularization is added here.
pub fn solve_spd(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::dims("solve_spd", "square A", format!("{:?}", a.shape())));
    }
    if b.rows() != n {
        return Err(Error::dims("solve_spd", format!("B with {n} rows"), format!("{:?}", b.shape())));
    }
    let l = cholesky_lower(a)?;
    let k = b.cols();
    let mut x = b.as_nalgebra().clone();
    // forward: L·Z = B
    for c in 0..k {
        for i in 0..n {
            let mut s = x[(i, c)];
            for p in 0..i {
                s -= l[i * n + p] * x[(p, c)];
            }
            x[(i, c)] = s / l[i * n + i];
        }
    }
    // backward: Lᵀ·X = Z
    for c in 0..k {
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for p in (i + 1)..n {
                s -= l[p * n + i] * x[(p, c)];
            }
            x[(i, c)] = s / l[i * n + i];
        }
    }
    let out = DenseMatrix::from_nalgebra(x);
    if !out.all_finite() {
        return Err(Error::NonFinite("solve_spd"));
    }
    Ok(out)
}

/// Row-major lower Cholesky factor.
fn cholesky_lower(a: &DenseMatrix) -> Result<Vec<f64>> {
    let n = a.rows();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[(j, j)];
        for p in 0..j {
            d -= l[j * n + p] * l[j * n + p];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for p in 0..j {
                s -= l[i * n + p] * l[j * n + p];
            }
            l[i * n + j] = s / djj;
        }
    }
    Ok(l)
}
