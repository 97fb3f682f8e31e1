use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ptelm::harness::{
    emit_report, emit_split_manifests, emit_sweep, sensitivity_sweep, Experiment, ExperimentConfig, ReportFormat,
    SweepParam, OUTPUT_DIR_ENV,
};
use ptelm::{Error, Result};

#[derive(Parser)]
#[command(name = "ptelm", about = "Parameter-transfer ELM experiments", disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every trial of an experiment and write the report.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides `format` from the config.
        #[arg(long)]
        format: Option<String>,
    },
    /// Repeat the experiment over a grid of one hyperparameter.
    Sweep {
        config: PathBuf,
        /// lambda1, lambda2, lambda3 or hidden_nodes.
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. 0.01,1,100.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Write the split manifests of every trial without training.
    Split {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Print the version.
    Version,
}

fn load(config: &Path, output_dir: Option<PathBuf>, format: Option<String>) -> Result<ExperimentConfig> {
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    let mut cfg = ExperimentConfig::from_file(config, env_dir.as_deref())?;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    if let Some(f) = format {
        cfg.format = f.parse::<ReportFormat>()?;
    }
    Ok(cfg)
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run {
            config,
            output_dir,
            format,
        } => {
            let cfg = load(&config, output_dir, format)?;
            let result = Experiment::load(cfg.clone())?.run()?;
            for s in &result.summaries {
                println!("{:<6} {:.4} ± {:.4}", s.method, s.mean, s.std);
            }
            let files = emit_report(&result, cfg.format, &cfg.output_dir)?;
            println!("wrote {} files to {}", files.len(), cfg.output_dir.display());
        }
        Command::Sweep {
            config,
            param,
            grid,
            output_dir,
            format,
        } => {
            let cfg = load(&config, output_dir, format)?;
            let param: SweepParam = param.parse()?;
            let grid = grid
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| Error::Config(format!("grid value '{v}': {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let table = sensitivity_sweep(&cfg, param, &grid)?;
            for row in &table.rows {
                let cells: Vec<String> = row.summaries.iter().map(|s| format!("{} {:.4}", s.method, s.mean)).collect();
                println!("{} = {}: {}", param.name(), row.value, cells.join(", "));
            }
            let path = emit_sweep(&table, cfg.format, &cfg.output_dir)?;
            println!("wrote {}", path.display());
        }
        Command::Split { config, output_dir } => {
            let cfg = load(&config, output_dir, None)?;
            let dir = cfg.output_dir.clone();
            let files = emit_split_manifests(&Experiment::load(cfg)?, &dir)?;
            println!("wrote {} manifests to {}", files.len(), dir.display());
        }
        Command::Version => println!("ptelm {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
