//! Report files. Layout under the output directory:
//!
//! | file | content |
//! |---|---|
//! | `accuracy.csv` | `method,mean,std,std_defined,trials` |
//! | `trials.csv` | `trial,seed,method,accuracy,correct,test_size` |
//! | `confusion/<method>_trial<NN>.csv` | per-trial counts, header plus `c` rows |
//! | `confusion/<method>_mean.csv` | cell means over trials |
//! | `objective_trace.csv` | `trial,iteration,objective` for PTELM |
//! | `report.json` | the whole [`AggregateResult`] (JSON format only) |
//! | `manifests/trial<NN>_{source,target}.txt` | selected rows per class |
//!
//! The JSON format writes only `report.json` and the manifests. The CSV
//! format writes every real number with 6 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::ReportFormat;
use super::run::{AggregateResult, Experiment, SweepTable};
use crate::data::{manifest_text, SplitIndices};
use crate::error::{Error, Result};

/// `%g`-style rendering with 6 significant digits: fixed notation for
/// exponents in `[-5, 6)`, scientific otherwise, trailing zeros removed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn confusion_header(c: usize) -> String {
    let mut h = String::from("truth");
    for j in 0..c {
        let _ = write!(h, ",pred_{j}");
    }
    h + "\n"
}

/// Writes the report files and returns their paths in creation order.
pub fn emit_report(result: &AggregateResult, format: ReportFormat, output_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = output_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |rel: String, body: String| -> Result<()> {
        let p = dir.join(rel);
        write_file(&p, &body)?;
        written.push(p);
        Ok(())
    };

    match format {
        ReportFormat::Json => {
            let json = serde_json::to_string_pretty(result)
                .map_err(|e| Error::Config(format!("cannot serialize report: {e}")))?;
            put("report.json".into(), json + "\n")?;
        }
        ReportFormat::Csv => {
            let n = result.trials.len();
            let mut acc = String::from("method,mean,std,std_defined,trials\n");
            for s in &result.summaries {
                let _ = writeln!(acc, "{},{},{},{},{n}", s.method, format_sig6(s.mean), format_sig6(s.std), s.std_defined);
            }
            put("accuracy.csv".into(), acc)?;

            let mut trials = String::from("trial,seed,method,accuracy,correct,test_size\n");
            let mut trace = String::from("trial,iteration,objective\n");
            for t in &result.trials {
                for m in &t.methods {
                    let correct: u64 = (0..m.confusion.len()).map(|i| m.confusion[i][i]).sum();
                    let _ = writeln!(
                        trials,
                        "{},{},{},{},{correct},{}",
                        t.trial,
                        t.seed,
                        m.method,
                        format_sig6(m.accuracy),
                        t.test_size
                    );
                }
                for (k, v) in t.objective_trace.iter().enumerate() {
                    let _ = writeln!(trace, "{},{},{}", t.trial, k + 1, format_sig6(*v));
                }
            }
            put("trials.csv".into(), trials)?;
            put("objective_trace.csv".into(), trace)?;

            let c = result.class_count;
            for t in &result.trials {
                for m in &t.methods {
                    let mut body = confusion_header(c);
                    for (i, row) in m.confusion.iter().enumerate() {
                        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
                        let _ = writeln!(body, "{i},{}", cells.join(","));
                    }
                    put(format!("confusion/{}_trial{:02}.csv", m.method, t.trial), body)?;
                }
            }
            for s in &result.summaries {
                let mut body = confusion_header(c);
                for (i, row) in s.mean_confusion.iter().enumerate() {
                    let cells: Vec<String> = row.iter().map(|v| format_sig6(*v)).collect();
                    let _ = writeln!(body, "{i},{}", cells.join(","));
                }
                put(format!("confusion/{}_mean.csv", s.method), body)?;
            }
        }
    }

    for t in &result.trials {
        written.extend(write_manifests(dir, t.trial, &result.source, &t.source_split, &result.target, &t.target_split)?);
    }
    Ok(written)
}

fn write_manifests(
    dir: &Path,
    trial: usize,
    source: &str,
    source_split: &SplitIndices,
    target: &str,
    target_split: &SplitIndices,
) -> Result<Vec<PathBuf>> {
    let mut out = Vec::with_capacity(2);
    for (role, name, split) in [("source", source, source_split), ("target", target, target_split)] {
        let p = dir.join(format!("manifests/trial{trial:02}_{role}.txt"));
        write_file(&p, &manifest_text(name, split))?;
        out.push(p);
    }
    Ok(out)
}

/// Writes only the split manifests of every trial of `exp`.
pub fn emit_split_manifests(exp: &Experiment, output_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for trial in 0..exp.config.trials {
        let (s, t) = exp.trial_splits(trial)?;
        out.extend(write_manifests(output_dir.as_ref(), trial, &exp.source.name, &s, &exp.target.name, &t)?);
    }
    Ok(out)
}

/// Writes `sweep.csv` (`param,value,method,mean,std`) or `sweep.json`.
pub fn emit_sweep(table: &SweepTable, format: ReportFormat, output_dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = output_dir.as_ref();
    let (name, body) = match format {
        ReportFormat::Json => (
            "sweep.json",
            serde_json::to_string_pretty(table).map_err(|e| Error::Config(format!("cannot serialize sweep: {e}")))? + "\n",
        ),
        ReportFormat::Csv => {
            let mut body = String::from("param,value,method,mean,std\n");
            for row in &table.rows {
                for s in &row.summaries {
                    let _ = writeln!(
                        body,
                        "{},{},{},{},{}",
                        table.param.name(),
                        format_sig6(row.value),
                        s.method,
                        format_sig6(s.mean),
                        format_sig6(s.std)
                    );
                }
            }
            ("sweep.csv", body)
        }
    };
    let p = dir.join(name);
    write_file(&p, &body)?;
    Ok(p)
}
