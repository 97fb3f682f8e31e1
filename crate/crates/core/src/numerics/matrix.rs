use std::fmt;
use std::ops::Index;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dense real matrix with explicit dimensions.
///
/// Entries are exposed in row-major logical order. The column count is always
/// at least one; the row count may be zero, which stands for an empty sample
/// set (for example a target domain with no labeled rows).
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    inner: DMatrix<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if cols == 0 {
            return Err(Error::InvalidDimension("matrix needs at least one column".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::dims(
                "from_row_major",
                format!("{} entries", rows * cols),
                format!("{} entries", entries.len()),
            ));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("from_row_major"));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::RaggedRows {
                row: i,
                expected: cols,
                got: r.len(),
            });
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(cols > 0, "matrix needs at least one column");
        Self {
            inner: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols > 0, "matrix needs at least one column");
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity needs n >= 1");
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    pub(crate) fn from_nalgebra(inner: DMatrix<f64>) -> Self {
        debug_assert!(inner.ncols() > 0);
        Self { inner }
    }

    pub(crate) fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.inner.row(i).iter().copied().collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.inner.column(j).iter().copied().collect()
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            out.extend(self.inner.row(i).iter());
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows()).map(|i| self.row(i)).collect()
    }

    /// Euclidean norm of row `i`.
    pub fn row_norm(&self, i: usize) -> f64 {
        self.inner.row(i).norm()
    }

    pub fn row_norms(&self) -> Vec<f64> {
        (0..self.rows()).map(|i| self.row_norm(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::dims(
                "matmul",
                format!("rhs with {} rows", self.cols()),
                format!("{:?}", rhs.shape()),
            ));
        }
        Ok(Self {
            inner: &self.inner * &rhs.inner,
        })
    }

    /// `selfᵀ · rhs` without materializing the transpose.
    pub fn t_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.rows() != rhs.rows() {
            return Err(Error::dims(
                "t_matmul",
                format!("rhs with {} rows", self.rows()),
                format!("{:?}", rhs.shape()),
            ));
        }
        Ok(Self {
            inner: self.inner.tr_mul(&rhs.inner),
        })
    }

    /// `self · rhsᵀ`.
    pub fn matmul_t(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.cols() {
            return Err(Error::dims(
                "matmul_t",
                format!("rhs with {} cols", self.cols()),
                format!("{:?}", rhs.shape()),
            ));
        }
        Ok(Self {
            inner: &self.inner * rhs.inner.transpose(),
        })
    }

    /// Gram matrix `selfᵀ · self`, exactly symmetric.
    pub fn gram(&self) -> Self {
        let mut g = self.inner.tr_mul(&self.inner);
        let n = g.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (g[(i, j)] + g[(j, i)]);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Self { inner: g }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.same_shape("add", rhs)?;
        Ok(Self {
            inner: &self.inner + &rhs.inner,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.same_shape("sub", rhs)?;
        Ok(Self {
            inner: &self.inner - &rhs.inner,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: &self.inner * s,
        }
    }

    /// Returns `self + s·I` for a square matrix.
    pub fn add_scaled_identity(&self, s: f64) -> Result<Self> {
        if self.rows() != self.cols() {
            return Err(Error::dims("add_scaled_identity", "square matrix", format!("{:?}", self.shape())));
        }
        let mut out = self.inner.clone();
        for i in 0..out.nrows() {
            out[(i, i)] += s;
        }
        Ok(Self { inner: out })
    }

    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Self {
        Self {
            inner: self.inner.map(f),
        }
    }

    pub fn trace(&self) -> f64 {
        self.inner.diagonal().iter().sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.inner.diagonal().iter().copied().collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.inner.iter().all(|v| v.is_finite())
    }

    /// Copies the listed rows, in order, into a new matrix.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), self.cols(), |i, j| self.inner[(indices[i], j)])
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &Self) -> Result<Self> {
        if self.cols() != below.cols() {
            return Err(Error::dims("vstack", format!("{} cols", self.cols()), format!("{} cols", below.cols())));
        }
        let top = self.rows();
        Ok(Self::from_fn(top + below.rows(), self.cols(), |i, j| {
            if i < top {
                self.inner[(i, j)]
            } else {
                below.inner[(i - top, j)]
            }
        }))
    }

    fn same_shape(&self, op: &'static str, rhs: &Self) -> Result<()> {
        if self.shape() != rhs.shape() {
            return Err(Error::dims(op, format!("{:?}", self.shape()), format!("{:?}", rhs.shape())));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.inner[idx]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix {}x{} {:?}", self.rows(), self.cols(), self.to_rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_round_trip() {
        let m = DenseMatrix::from_row_major(2, 3, vec![1., 2., 3., 4., 5., 6.]).unwrap();
        assert_eq!(m.get(0, 2), 3.0);
        assert_eq!(m.get(1, 0), 4.0);
        assert_eq!(m.to_row_major(), vec![1., 2., 3., 4., 5., 6.]);
        assert_eq!(m.transpose().shape(), (3, 2));
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(DenseMatrix::from_row_major(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::from_row_major(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::from_row_major(1, 0, vec![]).is_err());
        assert!(DenseMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn zero_row_matrices_compose() {
        let empty = DenseMatrix::zeros(0, 4);
        let b = DenseMatrix::identity(4);
        assert_eq!(empty.matmul(&b).unwrap().shape(), (0, 4));
        let g = empty.gram();
        assert_eq!(g.shape(), (4, 4));
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn products_agree() {
        let a = DenseMatrix::from_fn(3, 2, |i, j| (i * 2 + j) as f64 + 0.5);
        let b = DenseMatrix::from_fn(3, 4, |i, j| (i as f64) - (j as f64));
        let via_t = a.transpose().matmul(&b).unwrap();
        assert_eq!(a.t_matmul(&b).unwrap(), via_t);
        let c = DenseMatrix::from_fn(4, 2, |i, j| (i + j) as f64);
        assert_eq!(a.matmul_t(&c).unwrap(), a.matmul(&c.transpose()).unwrap());
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn vstack_and_select() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let s = a.vstack(&b).unwrap();
        assert_eq!(s.to_row_major(), vec![1., 2., 3., 4., 5., 6.]);
        assert_eq!(s.select_rows(&[2, 0]).to_row_major(), vec![5., 6., 1., 2.]);
    }
}
