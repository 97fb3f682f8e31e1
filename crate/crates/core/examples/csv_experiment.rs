//! End to end from CSV files: writes both synthetic domains to disk, runs a
//! configured experiment and emits the CSV report.

use std::fs;

use ptelm::data::{rotated_gaussians_shift, save_csv};
use ptelm::harness::{emit_report, run_experiment, ExperimentConfig};

fn main() -> ptelm::Result<()> {
    let dir = std::env::temp_dir().join("ptelm-csv-experiment");
    fs::create_dir_all(&dir).map_err(|e| ptelm::Error::io(&dir, e))?;
    let (source, target) = rotated_gaussians_shift(0)?;
    save_csv(&source, dir.join("source.csv"), true)?;
    save_csv(&target, dir.join("target.csv"), true)?;

    let config = "\
source_path = source.csv
target_path = target.csv
has_header = true
label_column = last
source_per_class = 100
target_labeled_per_class = 3
trials = 5
hidden_nodes = 50
output_dir = report
";
    let cfg_path = dir.join("experiment.cfg");
    fs::write(&cfg_path, config).map_err(|e| ptelm::Error::io(&cfg_path, e))?;

    let mut cfg = ExperimentConfig::from_file(&cfg_path, None)?;
    cfg.output_dir = dir.join(&cfg.output_dir);
    let result = run_experiment(&cfg)?;
    for s in &result.summaries {
        println!("{:<6} mean {:.4} std {:.4}", s.method, s.mean, s.std);
    }
    let files = emit_report(&result, cfg.format, &cfg.output_dir)?;
    println!("{} report files under {}", files.len(), cfg.output_dir.display());
    Ok(())
}
