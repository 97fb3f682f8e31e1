//! Multi-trial experiments comparing ELM_s, ELM_t and PTELM.

mod config;
mod report;
mod run;

pub use config::{
    DataSource, ExperimentConfig, Method, ReportFormat, DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV, SYNTHETIC_PREFIX,
};
pub use report::{emit_report, emit_split_manifests, emit_sweep, format_sig6};
pub use run::{
    confusion_accuracy, confusion_matrix, mean_std, run_experiment, run_trial, sensitivity_sweep, AggregateResult,
    Experiment, MethodOutcome, MethodSummary, SweepParam, SweepRow, SweepTable, TrialResult,
};
