use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::config::{DataSource, ExperimentConfig, Method};
use crate::data::{
    load_csv_with, rotated_gaussians_shift, sample_split, split_indices, standardize, DomainDataset, PcaModel, Role, SplitIndices, SplitSpec,
};
use crate::elm::{init_hidden_layer, ElmModel};
use crate::error::{Error, Result};
use crate::ptelm::{predict_target, train_ptelm, TARGET_LAYER_SEED_OFFSET};

/// Both domains loaded and standardized once, ready for any number of trials.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub source: DomainDataset,
    pub target: DomainDataset,
}

impl Experiment {
    /// Validates the config, reads both domains and standardizes each on
    /// its full feature matrix.
    pub fn load(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let source = load_domain(&config, &config.source, true)?;
        let target = load_domain(&config, &config.target, false)?;
        Self::from_datasets(config, source, target)
    }

    /// Uses already loaded domains; they are standardized here.
    pub fn from_datasets(config: ExperimentConfig, source: DomainDataset, target: DomainDataset) -> Result<Self> {
        if source.class_count != target.class_count {
            return Err(Error::ClassMismatch(format!(
                "source has {} classes, target has {}",
                source.class_count, target.class_count
            )));
        }
        let needs_shared = config.methods.contains(&Method::ElmS) || config.pca_dims.is_some();
        if needs_shared && source.features() != target.features() {
            return Err(Error::Config(format!(
                "elm_s and pca_dims need equal feature dimensions, got {} and {}",
                source.features(),
                target.features()
            )));
        }
        let source = source.with_features(standardize(&source.x).x)?;
        let target = target.with_features(standardize(&target.x).x)?;
        Ok(Self { config, source, target })
    }

    pub fn class_count(&self) -> usize {
        self.source.class_count
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.config.base_seed.wrapping_add(trial as u64)
    }

    /// Source and target row selections of one trial, without training.
    pub fn trial_splits(&self, trial: usize) -> Result<(SplitIndices, SplitIndices)> {
        let spec = SplitSpec {
            trial_seed: self.trial_seed(trial),
            ..self.config.split
        };
        Ok((
            split_indices(&self.source, &spec, Role::Source)?,
            split_indices(&self.target, &spec, Role::Target)?,
        ))
    }

    /// One trial with seed `base_seed + trial`, used for both splits and
    /// every hidden layer.
    pub fn run_trial(&self, trial: usize) -> Result<TrialResult> {
        let cfg = &self.config;
        let seed = self.trial_seed(trial);
        let spec = SplitSpec {
            trial_seed: seed,
            ..cfg.split
        };
        let src = sample_split(&self.source, &spec, Role::Source)?;
        let tgt = sample_split(&self.target, &spec, Role::Target)?;
        let (xs, xt, xtest) = match cfg.pca_dims {
            None => (src.train.x.clone(), tgt.train.x.clone(), tgt.test.x.clone()),
            Some(k) => {
                let pca = PcaModel::fit(&src.train.x.vstack(&tgt.train.x)?, k)?;
                (pca.transform(&src.train.x)?, pca.transform(&tgt.train.x)?, pca.transform(&tgt.test.x)?)
            }
        };
        let c = self.class_count();
        let truth = &tgt.test.y;
        let hp = &cfg.hyperparams;
        let mut methods = Vec::with_capacity(cfg.methods.len());
        let mut objective_trace = Vec::new();
        let mut inner_iterations = Vec::new();
        for &method in &cfg.methods {
            let pred = match method {
                Method::ElmS => {
                    let layer = init_hidden_layer(xs.cols(), hp.hidden_nodes, hp.activation, seed)?;
                    ElmModel::fit(layer, &xs, &src.train.y, c, cfg.elm_lambda)?.predict(&xtest)?
                }
                Method::ElmT => {
                    // same layer PTELM uses for the target domain
                    let layer_seed = if xt.cols() == xs.cols() {
                        seed
                    } else {
                        seed.wrapping_add(TARGET_LAYER_SEED_OFFSET)
                    };
                    let layer = init_hidden_layer(xt.cols(), hp.hidden_nodes, hp.activation, layer_seed)?;
                    ElmModel::fit(layer, &xt, &tgt.train.y, c, cfg.elm_lambda)?.predict(&xtest)?
                }
                Method::Ptelm => {
                    let model = train_ptelm(&xs, &src.train.y, &xt, &tgt.train.y, hp, seed)?;
                    objective_trace = model.objective_trace().to_vec();
                    inner_iterations = model.inner_iterations().to_vec();
                    predict_target(&model, &xtest)?
                }
            };
            let confusion = confusion_matrix(&pred, truth, c)?;
            methods.push(MethodOutcome {
                method,
                accuracy: confusion_accuracy(&confusion),
                confusion,
            });
        }
        Ok(TrialResult {
            trial,
            seed,
            test_size: truth.len(),
            methods,
            objective_trace,
            inner_iterations,
            source_split: src.indices,
            target_split: tgt.indices,
        })
    }

    /// Runs trials `0..trials` (in parallel when `threads != 1`) and
    /// aggregates them in trial order.
    pub fn run(&self) -> Result<AggregateResult> {
        let n = self.config.trials;
        let workers = match self.config.threads {
            0 => std::thread::available_parallelism().map_or(1, |p| p.get()),
            t => t,
        }
        .min(n)
        .max(1);
        let slots: Mutex<Vec<Option<Result<TrialResult>>>> = Mutex::new((0..n).map(|_| None).collect());
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= n {
                        break;
                    }
                    let r = self.run_trial(i);
                    slots.lock().expect("no worker panics while holding the lock")[i] = Some(r);
                });
            }
        });
        let mut trials = Vec::with_capacity(n);
        for (i, slot) in slots.into_inner().expect("workers joined").into_iter().enumerate() {
            match slot.expect("every trial index is claimed") {
                Ok(t) => trials.push(t),
                Err(e) => {
                    return Err(Error::Trial {
                        trial: i,
                        source: Box::new(e),
                    })
                }
            }
        }
        aggregate(&self.config, &self.source.name, &self.target.name, self.class_count(), trials)
    }
}

fn load_domain(cfg: &ExperimentConfig, src: &DataSource, is_source: bool) -> Result<DomainDataset> {
    match src {
        DataSource::Csv(path) => load_csv_with(path, cfg.has_header, cfg.label_column),
        DataSource::Synthetic(seed) => {
            let (s, t) = rotated_gaussians_shift(*seed)?;
            Ok(if is_source { s } else { t })
        }
    }
}

/// Loads the data and runs a single trial.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialResult> {
    Experiment::load(cfg.clone())?.run_trial(trial)
}

/// Loads the data and runs every trial. Any failing trial aborts the
/// experiment with an [`Error::Trial`] naming the lowest failing index.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<AggregateResult> {
    Experiment::load(cfg.clone())?.run()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub accuracy: f64,
    /// `confusion[i][j]` counts test samples of class `i` predicted as `j`.
    pub confusion: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub test_size: usize,
    pub methods: Vec<MethodOutcome>,
    /// PTELM objective after each outer iteration; empty without PTELM.
    pub objective_trace: Vec<f64>,
    pub inner_iterations: Vec<usize>,
    pub source_split: SplitIndices,
    pub target_split: SplitIndices,
}

impl TrialResult {
    pub fn outcome(&self, method: Method) -> Option<&MethodOutcome> {
        self.methods.iter().find(|m| m.method == method)
    }

    pub fn accuracy(&self, method: Method) -> Option<f64> {
        self.outcome(method).map(|m| m.accuracy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub mean: f64,
    /// Sample standard deviation (divisor `trials − 1`); 0 for one trial.
    pub std: f64,
    /// False when there was a single trial and `std` is 0 by convention.
    pub std_defined: bool,
    pub mean_confusion: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub source: String,
    pub target: String,
    pub class_count: usize,
    pub summaries: Vec<MethodSummary>,
    pub trials: Vec<TrialResult>,
}

impl AggregateResult {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }
}

/// Mean and sample standard deviation; `(mean, 0, false)` for one value.
pub fn mean_std(values: &[f64]) -> (f64, f64, bool) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0, false);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt(), true)
}

fn aggregate(cfg: &ExperimentConfig, source: &str, target: &str, c: usize, trials: Vec<TrialResult>) -> Result<AggregateResult> {
    let summaries = cfg
        .methods
        .iter()
        .map(|&method| {
            let outcomes: Vec<&MethodOutcome> = trials.iter().filter_map(|t| t.outcome(method)).collect();
            let accs: Vec<f64> = outcomes.iter().map(|o| o.accuracy).collect();
            let (mean, std, std_defined) = mean_std(&accs);
            let n = outcomes.len() as f64;
            let mean_confusion = (0..c)
                .map(|i| (0..c).map(|j| outcomes.iter().map(|o| o.confusion[i][j] as f64).sum::<f64>() / n).collect())
                .collect();
            MethodSummary {
                method,
                mean,
                std,
                std_defined,
                mean_confusion,
            }
        })
        .collect();
    Ok(AggregateResult {
        source: source.to_string(),
        target: target.to_string(),
        class_count: c,
        summaries,
        trials,
    })
}

/// Counts with truth on rows and prediction on columns.
pub fn confusion_matrix(pred: &[usize], truth: &[usize], c: usize) -> Result<Vec<Vec<u64>>> {
    if pred.len() != truth.len() {
        return Err(Error::dims("confusion_matrix", format!("{} predictions", truth.len()), pred.len()));
    }
    let mut m = vec![vec![0u64; c]; c];
    for (&p, &t) in pred.iter().zip(truth) {
        for label in [p, t] {
            if label >= c {
                return Err(Error::LabelOutOfRange { label, classes: c });
            }
        }
        m[t][p] += 1;
    }
    Ok(m)
}

/// Trace over total; 0 for an empty matrix.
pub fn confusion_accuracy(m: &[Vec<u64>]) -> f64 {
    let total: u64 = m.iter().flatten().sum();
    if total == 0 {
        return 0.0;
    }
    let trace: u64 = (0..m.len()).map(|i| m[i][i]).sum();
    trace as f64 / total as f64
}

/// Hyperparameter varied by a sensitivity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Lambda1,
    Lambda2,
    Lambda3,
    HiddenNodes,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Lambda1 => "lambda1",
            SweepParam::Lambda2 => "lambda2",
            SweepParam::Lambda3 => "lambda3",
            SweepParam::HiddenNodes => "hidden_nodes",
        }
    }

    /// Copy of `cfg` with this parameter set to `value`.
    pub fn apply(self, cfg: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut out = cfg.clone();
        let hp = &mut out.hyperparams;
        match self {
            SweepParam::Lambda1 => hp.lambda1 = value,
            SweepParam::Lambda2 => hp.lambda2 = value,
            SweepParam::Lambda3 => hp.lambda3 = value,
            SweepParam::HiddenNodes => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(Error::Config(format!("hidden_nodes must be a positive integer, got {value}")));
                }
                hp.hidden_nodes = value as usize;
            }
        }
        out.validate()?;
        Ok(out)
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda1" | "λ1" => Ok(SweepParam::Lambda1),
            "lambda2" | "λ2" => Ok(SweepParam::Lambda2),
            "lambda3" | "λ3" => Ok(SweepParam::Lambda3),
            "hidden_nodes" | "L" => Ok(SweepParam::HiddenNodes),
            _ => Err(Error::Config(format!(
                "unknown sweep parameter '{s}' (expected lambda1, lambda2, lambda3 or hidden_nodes)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub summaries: Vec<MethodSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// `(value, mean)` pairs for one method.
    pub fn curve(&self, method: Method) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.summaries.iter().find(|s| s.method == method).map(|s| (r.value, s.mean)))
            .collect()
    }
}

/// Runs the full experiment once per grid value, changing only `param`.
pub fn sensitivity_sweep(cfg: &ExperimentConfig, param: SweepParam, grid: &[f64]) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid must contain at least one value".into()));
    }
    let base = Experiment::load(cfg.clone())?;
    let mut rows = Vec::with_capacity(grid.len());
    for &value in grid {
        let exp = Experiment {
            config: param.apply(cfg, value)?,
            ..base.clone()
        };
        rows.push(SweepRow {
            value,
            summaries: exp.run()?.summaries,
        });
    }
    Ok(SweepTable { param, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn confusion_examples() {
        let truth = [0, 1, 2, 1];
        let perfect = confusion_matrix(&truth, &truth, 3).unwrap();
        assert_eq!(perfect, vec![vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 1]]);
        let zeros = confusion_matrix(&[0, 0, 0, 0], &truth, 3).unwrap();
        assert_eq!(zeros, vec![vec![1, 0, 0], vec![2, 0, 0], vec![1, 0, 0]]);
        assert!(matches!(
            confusion_matrix(&[0, 3, 0, 0], &truth, 3),
            Err(Error::LabelOutOfRange { label: 3, classes: 3 })
        ));
        assert_eq!(confusion_accuracy(&perfect), 1.0);
        assert_eq!(confusion_accuracy(&zeros), 0.25);
    }

    #[test]
    fn mean_std_examples() {
        let (m, s, ok) = mean_std(&[0.5, 0.7]);
        assert!((m - 0.6).abs() < 1e-15 && (s - 0.02f64.sqrt()).abs() < 1e-15 && ok);
        assert_eq!(mean_std(&[0.3]), (0.3, 0.0, false));
    }

    proptest! {
        #[test]
        fn confusion_rows_count_truth(pairs in proptest::collection::vec((0usize..4, 0usize..4), 0..60)) {
            let (pred, truth): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
            let m = confusion_matrix(&pred, &truth, 4).unwrap();
            for (k, row) in m.iter().enumerate() {
                prop_assert_eq!(row.iter().sum::<u64>() as usize, truth.iter().filter(|&&t| t == k).count());
            }
            let correct = pred.iter().zip(&truth).filter(|(p, t)| p == t).count();
            if !truth.is_empty() {
                prop_assert_eq!(confusion_accuracy(&m), correct as f64 / truth.len() as f64);
            }
        }
    }
}
