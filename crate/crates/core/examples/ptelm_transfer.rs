//! Trains PTELM with 3 labeled target samples per class and prints the
//! outer objective trace.

use ptelm::data::{rotated_gaussians_shift, sample_split, standardize, Role, SplitSpec};
use ptelm::elm::accuracy;
use ptelm::ptelm::{predict_target, train_ptelm, PtelmHyperparams};

fn main() -> ptelm::Result<()> {
    let (source, target) = rotated_gaussians_shift(0)?;
    let source = source.with_features(standardize(&source.x).x)?;
    let target = target.with_features(standardize(&target.x).x)?;
    let spec = SplitSpec {
        source_per_class: 100,
        target_labeled_per_class: 3,
        trial_seed: 1,
    };
    let src = sample_split(&source, &spec, Role::Source)?;
    let tgt = sample_split(&target, &spec, Role::Target)?;

    let hp = PtelmHyperparams {
        hidden_nodes: 50,
        ..PtelmHyperparams::default()
    };
    let model = train_ptelm(&src.train.x, &src.train.y, &tgt.train.x, &tgt.train.y, &hp, spec.trial_seed)?;
    for (k, v) in model.objective_trace().iter().enumerate() {
        println!("outer {:>2}: objective {v:.6} ({} inner updates)", k + 1, model.inner_iterations()[k]);
    }
    let acc = accuracy(&predict_target(&model, &tgt.test.x)?, &tgt.test.y)?;
    println!("target test accuracy {acc:.4} on {} samples", tgt.test.len());
    Ok(())
}
