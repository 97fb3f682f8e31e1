//! Ridge ELM trained on the source domain of the synthetic shift and
//! evaluated on both domains.

use ptelm::data::rotated_gaussians_shift;
use ptelm::elm::{accuracy, init_hidden_layer, Activation, ElmModel};

fn main() -> ptelm::Result<()> {
    let (source, target) = rotated_gaussians_shift(0)?;
    let layer = init_hidden_layer(source.features(), 50, Activation::Sigmoid, 7)?;
    let model = ElmModel::fit(layer, &source.x, &source.y, source.class_count, 1.0)?;

    let on_source = accuracy(&model.predict(&source.x)?, &source.y)?;
    let on_target = accuracy(&model.predict(&target.x)?, &target.y)?;
    println!("source accuracy {on_source:.3}");
    println!("target accuracy {on_target:.3} (rotated domain)");
    Ok(())
}
