//! Reduces 30 correlated features to 5 principal components.

use ptelm::data::PcaModel;
use ptelm::numerics::{random_uniform_matrix, DenseMatrix, SeededRng};

fn main() -> ptelm::Result<()> {
    let mut rng = SeededRng::new(11);
    let latent = DenseMatrix::from_fn(200, 5, |_, _| rng.standard_normal());
    let mixing = random_uniform_matrix(5, 30, 12, -1.0, 1.0)?;
    let noise = DenseMatrix::from_fn(200, 30, |_, _| 0.05 * rng.standard_normal());
    let x = latent.matmul(&mixing)?.add(&noise)?;

    let pca = PcaModel::fit(&x, 5)?;
    let reduced = pca.transform(&x)?;
    println!("reduced shape {:?}", reduced.shape());
    println!("captured variance {:.4}", pca.captured_variance());
    println!("numerical rank {}", pca.numerical_rank);
    Ok(())
}
