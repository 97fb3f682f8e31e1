//! Varies one hyperparameter at a time on the synthetic shift.

use ptelm::harness::{sensitivity_sweep, ExperimentConfig, Method, SweepParam};

fn main() -> ptelm::Result<()> {
    let mut cfg = ExperimentConfig::synthetic(0);
    cfg.trials = 5;
    for (param, grid) in [
        (SweepParam::Lambda1, vec![0.01, 1.0, 100.0]),
        (SweepParam::Lambda3, vec![0.1, 10.0, 1000.0]),
        (SweepParam::HiddenNodes, vec![10.0, 50.0, 200.0]),
    ] {
        let table = sensitivity_sweep(&cfg, param, &grid)?;
        for (value, mean) in table.curve(Method::Ptelm) {
            println!("{:<12} {value:>8}: ptelm {mean:.4}", param.name());
        }
    }
    Ok(())
}
