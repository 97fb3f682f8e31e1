//! Draws a stratified target split and prints its manifest.

use ptelm::data::{manifest_text, rotated_gaussians_shift, split_indices, Role, SplitSpec};

fn main() -> ptelm::Result<()> {
    let (_, target) = rotated_gaussians_shift(0)?;
    let spec = SplitSpec {
        source_per_class: 100,
        target_labeled_per_class: 3,
        trial_seed: 4,
    };
    let split = split_indices(&target, &spec, Role::Target)?;
    print!("{}", manifest_text(&target.name, &split));
    Ok(())
}
