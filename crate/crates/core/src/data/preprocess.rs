use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Columns with a population standard deviation at or below this are
/// treated as constant.
pub const CONSTANT_STD: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Standardized {
    pub x: DenseMatrix,
    pub mean: Vec<f64>,
    /// Population (divisor N) standard deviation; 1 for constant columns.
    pub std: Vec<f64>,
}

/// Zero-mean, unit-variance columns. Constant columns become 0.
pub fn standardize(x: &DenseMatrix) -> Standardized {
    let (n, d) = x.shape();
    let mut mean = vec![0.0; d];
    let mut std = vec![1.0; d];
    for j in 0..d {
        let col = x.column(j);
        let m = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
        mean[j] = m;
        let s = var.sqrt();
        if s > CONSTANT_STD {
            std[j] = s;
        }
    }
    let constant: Vec<bool> = (0..d).map(|j| std[j] == 1.0 && !(x.column(j).iter().any(|&v| v != mean[j]))).collect();
    let z = DenseMatrix::from_fn(n, d, |i, j| if constant[j] { 0.0 } else { (x[(i, j)] - mean[j]) / std[j] });
    Standardized { x: z, mean, std }
}

/// Principal directions fitted on one matrix and applied to others.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `d × k`, orthonormal columns.
    pub components: DenseMatrix,
    /// Squared singular values of the centered data, descending.
    pub singular_values_sq: Vec<f64>,
    /// Sum of all squared singular values (total centered sum of squares).
    pub total_sum_sq: f64,
    /// Count of singular values above `max(N, d)·eps·σ_max`.
    pub numerical_rank: usize,
}

impl PcaModel {
    /// Top-`k` right singular directions of the column-centered `x`.
    ///
    /// Each component is signed so its largest-magnitude entry is positive.
    /// When `k` exceeds the numerical rank the trailing components span
    /// directions with zero variance and project everything to 0;
    /// [`PcaModel::numerical_rank`] tells callers when that happened.
    pub fn fit(x: &DenseMatrix, k: usize) -> Result<Self> {
        let (n, d) = x.shape();
        if k == 0 {
            return Err(Error::InvalidDimension("PCA needs k >= 1".into()));
        }
        if k > n.min(d) {
            return Err(Error::RankDeficient {
                requested: k,
                rank: n.min(d),
            });
        }
        let mean: Vec<f64> = (0..d).map(|j| x.column(j).iter().sum::<f64>() / n as f64).collect();
        let centered = DMatrix::from_fn(n, d, |i, j| x[(i, j)] - mean[j]);
        let svd = centered.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let sv = svd.singular_values;
        let mut order: Vec<usize> = (0..sv.len()).collect();
        order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]).then(a.cmp(&b)));

        let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
        let tol = n.max(d) as f64 * f64::EPSILON * sigma_max;
        let numerical_rank = sv.iter().filter(|&&s| s > tol).count();

        let mut comps = DenseMatrix::zeros(d, k).to_rows();
        for (c, &idx) in order.iter().take(k).enumerate() {
            let dir: Vec<f64> = v_t.row(idx).iter().copied().collect();
            let pivot = dir
                .iter()
                .enumerate()
                .fold(0, |best, (i, v)| if v.abs() > dir[best].abs() { i } else { best });
            let sign = if dir[pivot] < 0.0 { -1.0 } else { 1.0 };
            for (j, v) in dir.iter().enumerate() {
                comps[j][c] = sign * v;
            }
        }
        Ok(Self {
            mean,
            components: DenseMatrix::from_rows(&comps)?,
            singular_values_sq: order.iter().map(|&i| sv[i] * sv[i]).collect(),
            total_sum_sq: sv.iter().map(|s| s * s).sum(),
            numerical_rank,
        })
    }

    pub fn dims(&self) -> usize {
        self.components.cols()
    }

    /// `(x − mean) · components`.
    pub fn transform(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.cols() != self.mean.len() {
            return Err(Error::dims("PcaModel::transform", format!("{} cols", self.mean.len()), x.cols()));
        }
        let centered = DenseMatrix::from_fn(x.rows(), x.cols(), |i, j| x[(i, j)] - self.mean[j]);
        centered.matmul(&self.components)
    }

    /// Fraction of the centered sum of squares captured by the first `k`
    /// components.
    pub fn captured_variance(&self) -> f64 {
        if self.total_sum_sq == 0.0 {
            return 0.0;
        }
        self.singular_values_sq.iter().take(self.dims()).sum::<f64>() / self.total_sum_sq
    }
}

/// Fits PCA on `x` and projects it: returns `(x_k, components)`.
pub fn pca_fit_transform(x: &DenseMatrix, k: usize) -> Result<(DenseMatrix, DenseMatrix)> {
    let model = PcaModel::fit(x, k)?;
    Ok((model.transform(x)?, model.components))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{frobenius_norm, random_uniform_matrix, SeededRng};

    fn col_stats(x: &DenseMatrix, j: usize) -> (f64, f64) {
        let c = x.column(j);
        let n = c.len() as f64;
        let m = c.iter().sum::<f64>() / n;
        (m, c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n)
    }

    #[test]
    fn standardize_two_values() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 5.0], vec![3.0, 5.0]]).unwrap();
        let s = standardize(&x);
        assert_eq!(s.x.column(0), vec![-1.0, 1.0]);
        assert_eq!(s.mean, vec![2.0, 5.0]);
        assert_eq!(s.std, vec![1.0, 1.0]);
        assert_eq!(s.x.column(1), vec![0.0, 0.0]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let x = DenseMatrix::from_rows(&[vec![5.0], vec![5.0], vec![5.0]]).unwrap();
        let s = standardize(&x);
        assert_eq!(s.x.column(0), vec![0.0, 0.0, 0.0]);
        assert_eq!(s.std, vec![1.0]);
    }

    #[test]
    fn standardized_columns_have_unit_stats() {
        let x = random_uniform_matrix(100, 10, 3, -5.0, 20.0).unwrap();
        let s = standardize(&x);
        for j in 0..10 {
            let (m, v) = col_stats(&s.x, j);
            assert!(m.abs() <= 1e-10 && (v - 1.0).abs() <= 1e-10);
        }
        let again = standardize(&s.x);
        assert!(again.x.sub(&s.x).unwrap().max_abs() <= 1e-10);
    }

    fn recon_error(x: &DenseMatrix, k: usize) -> f64 {
        let model = PcaModel::fit(x, k).unwrap();
        let centered = DenseMatrix::from_fn(x.rows(), x.cols(), |i, j| x[(i, j)] - model.mean[j]);
        let xk = model.transform(x).unwrap();
        let back = xk.matmul_t(&model.components).unwrap();
        frobenius_norm(&centered.sub(&back).unwrap()) / frobenius_norm(&centered)
    }

    #[test]
    fn exact_rank_reconstruction() {
        let a = random_uniform_matrix(50, 2, 1, -1.0, 1.0).unwrap();
        let b = random_uniform_matrix(2, 8, 2, -1.0, 1.0).unwrap();
        let x = a.matmul(&b).unwrap();
        assert!(recon_error(&x, 2) <= 1e-8);
        let model = PcaModel::fit(&x, 4).unwrap();
        assert!(model.numerical_rank <= 2);
    }

    #[test]
    fn full_dimension_is_lossless() {
        let x = random_uniform_matrix(40, 6, 4, -1.0, 1.0).unwrap();
        assert!(recon_error(&x, 6) <= 1e-8);
    }

    #[test]
    fn captured_variance_matches_spectrum() {
        let x = random_uniform_matrix(200, 30, 5, -1.0, 1.0).unwrap();
        let model = PcaModel::fit(&x, 5).unwrap();
        // oracle: eigenvalues of the centered scatter matrix via a full decomposition
        let centered = DMatrix::from_fn(200, 30, |i, j| x[(i, j)] - model.mean[j]);
        let scatter = centered.transpose() * &centered;
        let mut eig: Vec<f64> = scatter.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        let expect = eig[..5].iter().sum::<f64>() / eig.iter().sum::<f64>();
        assert!((model.captured_variance() - expect).abs() < 1e-10);

        let c = &model.components;
        let gram = c.t_matmul(c).unwrap();
        assert!(frobenius_norm(&gram.sub(&DenseMatrix::identity(5)).unwrap()) <= 1e-8);
        assert!(model.singular_values_sq.windows(2).all(|w| w[0] >= w[1]));
        for j in 0..5 {
            let col = c.column(j);
            let big = col.iter().cloned().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn pca_rejects_bad_k() {
        let x = random_uniform_matrix(5, 3, 6, -1.0, 1.0).unwrap();
        assert!(PcaModel::fit(&x, 0).is_err());
        assert!(matches!(PcaModel::fit(&x, 4), Err(Error::RankDeficient { requested: 4, rank: 3 })));
    }

    #[test]
    fn wide_matrices_work() {
        let mut rng = SeededRng::new(1);
        let x = DenseMatrix::from_fn(10, 40, |_, _| rng.standard_normal());
        let (xk, comps) = pca_fit_transform(&x, 5).unwrap();
        assert_eq!(xk.shape(), (10, 5));
        assert_eq!(comps.shape(), (40, 5));
    }
}
