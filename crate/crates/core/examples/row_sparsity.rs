//! A heavy l2,1 penalty switches off whole hidden nodes of the source model.

use ptelm::elm::{hidden_map, init_hidden_layer, one_hot, Activation};
use ptelm::numerics::{l21_norm, DenseMatrix, SeededRng};
use ptelm::ptelm::{solve_beta_s, PtelmHyperparams};

fn main() -> ptelm::Result<()> {
    let mut rng = SeededRng::new(3);
    let x = DenseMatrix::from_fn(300, 5, |_, _| rng.standard_normal());
    let labels: Vec<usize> = (0..300).map(|i| usize::from(x[(i, 0)] + x[(i, 1)] > 0.0)).collect();
    let layer = init_hidden_layer(5, 40, Activation::Sigmoid, 3)?;
    let h = hidden_map(&layer, &x)?;
    let y = one_hot(&labels, 2)?;
    let no_target = DenseMatrix::zeros(0, 40);
    let no_labels = DenseMatrix::zeros(0, 2);

    for lambda2 in [0.0, 1.0, 100.0, 1000.0] {
        let hp = PtelmHyperparams {
            lambda2,
            lambda3: 0.0,
            hidden_nodes: 40,
            inner_max_iters: 200,
            ..PtelmHyperparams::default()
        };
        let beta = solve_beta_s(&h, &no_target, &DenseMatrix::identity(40), &y, &no_labels, &hp)?;
        let active = beta.row_norms().iter().filter(|&&r| r > 1e-4).count();
        println!("lambda2 {lambda2:>6}: {active:>2}/40 active rows, l21 {:.4}", l21_norm(&beta));
    }
    Ok(())
}
