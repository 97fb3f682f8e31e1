//! Two-dimensional Gaussian blobs with a rotated target domain.

use std::f64::consts::PI;

use super::DomainDataset;
use crate::error::{Error, Result};
use crate::numerics::rng::STREAM_SYNTHETIC;
use crate::numerics::{DenseMatrix, SeededRng};

#[derive(Debug, Clone, PartialEq)]
pub struct RotatedGaussians {
    /// Samples per class; the length is the class count.
    pub class_sizes: Vec<usize>,
    /// Distance of every class mean from the origin.
    pub radius: f64,
    /// Isotropic standard deviation around each mean.
    pub std: f64,
    /// Angle added to all class means, in radians.
    pub rotation: f64,
}

impl RotatedGaussians {
    /// Draws the samples class by class. Class `k` is centered at
    /// `radius·(cos θk, sin θk)` with `θk = 2πk/c + rotation`.
    pub fn generate(&self, name: &str, seed: u64, stream_offset: u64) -> Result<DomainDataset> {
        let c = self.class_sizes.len();
        if c == 0 || self.class_sizes.contains(&0) {
            return Err(Error::InvalidDimension("every class needs at least one sample".into()));
        }
        if !(self.std >= 0.0 && self.radius.is_finite() && self.rotation.is_finite()) {
            return Err(Error::NonFinite("rotated gaussian parameters"));
        }
        let mut rng = SeededRng::with_stream(seed, STREAM_SYNTHETIC + stream_offset);
        let mut entries = Vec::new();
        let mut labels = Vec::new();
        for (k, &n) in self.class_sizes.iter().enumerate() {
            let theta = 2.0 * PI * k as f64 / c as f64 + self.rotation;
            let (cx, cy) = (self.radius * theta.cos(), self.radius * theta.sin());
            for _ in 0..n {
                entries.push(cx + self.std * rng.standard_normal());
                entries.push(cy + self.std * rng.standard_normal());
                labels.push(k);
            }
        }
        let x = DenseMatrix::from_row_major(labels.len(), 2, entries)?;
        DomainDataset::new(name, x, labels, c)
    }
}

/// The standard three-class shift: 100 source samples per class, a target
/// rotated by 45° with 70, 70 and 69 samples, so that 3 labeled rows per
/// class leave 200 for testing.
pub fn rotated_gaussians_shift(seed: u64) -> Result<(DomainDataset, DomainDataset)> {
    let source = RotatedGaussians {
        class_sizes: vec![100; 3],
        radius: 3.0,
        std: 1.0,
        rotation: 0.0,
    };
    let target = RotatedGaussians {
        class_sizes: vec![70, 70, 69],
        rotation: PI / 4.0,
        ..source.clone()
    };
    Ok((source.generate("source", seed, 0)?, target.generate("target", seed, 1)?))
}
