//! Flat `key = value` experiment configuration.
//!
//! One setting per line, `#` starts a comment, keys are case-sensitive and
//! may appear once. Unknown keys are rejected. See the README for the full
//! key list.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{LabelColumn, SplitSpec};
use crate::error::{Error, Result};
use crate::ptelm::PtelmHyperparams;

/// Environment variable holding the default output directory.
pub const OUTPUT_DIR_ENV: &str = "PTELM_OUTPUT_DIR";
/// Output directory used when neither the config nor the environment names one.
pub const DEFAULT_OUTPUT_DIR: &str = "ptelm-out";
/// Prefix of a data path that selects the built-in rotated-Gaussians shift;
/// the rest of the value is the data seed, e.g. `synthetic:0`.
pub const SYNTHETIC_PREFIX: &str = "synthetic:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ElmS,
    ElmT,
    Ptelm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::ElmS, Method::ElmT, Method::Ptelm];

    pub fn name(self) -> &'static str {
        match self {
            Method::ElmS => "elm_s",
            Method::ElmT => "elm_t",
            Method::Ptelm => "ptelm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method '{s}' (expected elm_s, elm_t or ptelm)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::Config(format!("unknown report format '{s}' (expected csv or json)"))),
        }
    }
}

/// Where a domain's samples come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    Csv(PathBuf),
    /// Built-in rotated-Gaussians shift drawn with this data seed.
    Synthetic(u64),
}

impl DataSource {
    pub fn parse(value: &str, base: Option<&Path>) -> Result<Self> {
        if let Some(seed) = value.strip_prefix(SYNTHETIC_PREFIX) {
            let seed = seed
                .parse()
                .map_err(|_| Error::Config(format!("bad synthetic data seed in '{value}'")))?;
            return Ok(DataSource::Synthetic(seed));
        }
        let p = PathBuf::from(value);
        Ok(DataSource::Csv(match base {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p,
        }))
    }
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSource::Csv(p) => write!(f, "{}", p.display()),
            DataSource::Synthetic(seed) => write!(f, "{SYNTHETIC_PREFIX}{seed}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub target: DataSource,
    pub has_header: bool,
    pub label_column: LabelColumn,
    /// `trial_seed` is ignored here; each trial uses `base_seed + trial`.
    pub split: SplitSpec,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub hyperparams: PtelmHyperparams,
    /// Ridge parameter of the ELM baselines.
    pub elm_lambda: f64,
    pub pca_dims: Option<usize>,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub format: ReportFormat,
    /// Worker threads for trials; 0 picks the available parallelism.
    pub threads: usize,
}

impl ExperimentConfig {
    /// A config with default protocol settings for the given domains.
    pub fn new(source: DataSource, target: DataSource, source_per_class: usize, target_labeled_per_class: usize) -> Self {
        Self {
            source,
            target,
            has_header: false,
            label_column: LabelColumn::Last,
            split: SplitSpec {
                source_per_class,
                target_labeled_per_class,
                trial_seed: 0,
            },
            trials: 20,
            methods: Method::ALL.to_vec(),
            hyperparams: PtelmHyperparams::default(),
            elm_lambda: 1.0,
            pca_dims: None,
            base_seed: 0,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            format: ReportFormat::Csv,
            threads: 0,
        }
    }

    /// The synthetic shift protocol: 100 source and 3 labeled target rows
    /// per class, `L = 50`.
    pub fn synthetic(data_seed: u64) -> Self {
        let mut cfg = Self::new(DataSource::Synthetic(data_seed), DataSource::Synthetic(data_seed), 100, 3);
        cfg.hyperparams.hidden_nodes = 50;
        cfg
    }

    /// Reads a config file. Relative data paths resolve against the file's
    /// directory; `default_output` applies when `output_dir` is absent.
    pub fn from_file(path: impl AsRef<Path>, default_output: Option<&Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path.parent(), default_output)
    }

    pub fn parse(text: &str, base: Option<&Path>, default_output: Option<&Path>) -> Result<Self> {
        let mut entries: Vec<(String, String, usize)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", n + 1)))?;
            let k = k.trim().to_string();
            if entries.iter().any(|(seen, _, _)| *seen == k) {
                return Err(Error::Config(format!("line {}: duplicate key '{k}'", n + 1)));
            }
            entries.push((k, v.trim().to_string(), n + 1));
        }
        let get = |key: &str| entries.iter().find(|(k, _, _)| k == key).map(|(_, v, _)| v.as_str());
        let need = |key: &str| get(key).ok_or_else(|| Error::Config(format!("missing required key '{key}'")));

        let source = DataSource::parse(need("source_path")?, base)?;
        let target = DataSource::parse(need("target_path")?, base)?;
        let mut cfg = Self::new(
            source,
            target,
            num(need("source_per_class")?, "source_per_class")?,
            num(need("target_labeled_per_class")?, "target_labeled_per_class")?,
        );
        if let Some(dir) = default_output {
            cfg.output_dir = dir.to_path_buf();
        }
        let hp = &mut cfg.hyperparams;
        for (key, value, line) in &entries {
            let v = value.as_str();
            match key.as_str() {
                "source_path" | "target_path" | "source_per_class" | "target_labeled_per_class" => {}
                "has_header" => cfg.has_header = boolean(v, key)?,
                "label_column" => {
                    cfg.label_column = if v == "last" {
                        LabelColumn::Last
                    } else {
                        LabelColumn::Index(num(v, key)?)
                    }
                }
                "trials" => cfg.trials = num(v, key)?,
                "methods" => cfg.methods = parse_methods(v)?,
                "lambda1" => hp.lambda1 = num(v, key)?,
                "lambda2" => hp.lambda2 = num(v, key)?,
                "lambda3" => hp.lambda3 = num(v, key)?,
                "hidden_nodes" => hp.hidden_nodes = num(v, key)?,
                "activation" => hp.activation = v.parse().map_err(|e| Error::Config(format!("activation: {e}")))?,
                "epsilon" => hp.epsilon = num(v, key)?,
                "delta" => hp.delta = num(v, key)?,
                "inner_max_iters" => hp.inner_max_iters = num(v, key)?,
                "inner_tol" => hp.inner_tol = num(v, key)?,
                "outer_max_iters" => hp.outer_max_iters = num(v, key)?,
                "outer_tol" => hp.outer_tol = num(v, key)?,
                "elm_lambda" => cfg.elm_lambda = num(v, key)?,
                "pca_dims" => cfg.pca_dims = if v == "none" { None } else { Some(num(v, key)?) },
                "base_seed" => cfg.base_seed = num(v, key)?,
                "output_dir" => cfg.output_dir = PathBuf::from(v),
                "format" => cfg.format = v.parse()?,
                "threads" => cfg.threads = num(v, key)?,
                _ => return Err(Error::Config(format!("line {line}: unknown key '{key}'"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every field and that CSV inputs exist.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods must name at least one of elm_s, elm_t, ptelm".into()));
        }
        if self.split.source_per_class == 0 || self.split.target_labeled_per_class == 0 {
            return Err(Error::Config("per-class counts must be at least 1".into()));
        }
        if !(self.elm_lambda > 0.0 && self.elm_lambda.is_finite()) {
            return Err(Error::Config(format!("elm_lambda must be a positive real, got {}", self.elm_lambda)));
        }
        if self.pca_dims == Some(0) {
            return Err(Error::Config("pca_dims must be at least 1".into()));
        }
        self.hyperparams.validate()?;
        for (role, src) in [("source", &self.source), ("target", &self.target)] {
            if let DataSource::Csv(p) = src {
                if !p.is_file() {
                    return Err(Error::Config(format!("{role} file {} does not exist", p.display())));
                }
            }
        }
        Ok(())
    }

    /// Renders the config in the file format accepted by [`Self::parse`].
    pub fn to_text(&self) -> String {
        let hp = &self.hyperparams;
        let label = match self.label_column {
            LabelColumn::Last => "last".to_string(),
            LabelColumn::Index(i) => i.to_string(),
        };
        let methods: Vec<&str> = self.methods.iter().map(|m| m.name()).collect();
        let pca = self.pca_dims.map_or_else(|| "none".to_string(), |k| k.to_string());
        let format = match self.format {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        };
        [
            format!("source_path = {}", self.source),
            format!("target_path = {}", self.target),
            format!("has_header = {}", self.has_header),
            format!("label_column = {label}"),
            format!("source_per_class = {}", self.split.source_per_class),
            format!("target_labeled_per_class = {}", self.split.target_labeled_per_class),
            format!("trials = {}", self.trials),
            format!("methods = {}", methods.join(",")),
            format!("lambda1 = {:?}", hp.lambda1),
            format!("lambda2 = {:?}", hp.lambda2),
            format!("lambda3 = {:?}", hp.lambda3),
            format!("hidden_nodes = {}", hp.hidden_nodes),
            format!("activation = {}", hp.activation),
            format!("epsilon = {:?}", hp.epsilon),
            format!("delta = {:?}", hp.delta),
            format!("inner_max_iters = {}", hp.inner_max_iters),
            format!("inner_tol = {:?}", hp.inner_tol),
            format!("outer_max_iters = {}", hp.outer_max_iters),
            format!("outer_tol = {:?}", hp.outer_tol),
            format!("elm_lambda = {:?}", self.elm_lambda),
            format!("pca_dims = {pca}"),
            format!("base_seed = {}", self.base_seed),
            format!("output_dir = {}", self.output_dir.display()),
            format!("format = {format}"),
            format!("threads = {}", self.threads),
        ]
        .join("\n")
            + "\n"
    }
}

fn num<T: FromStr>(v: &str, key: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| Error::Config(format!("{key}: cannot parse '{v}': {e}")))
}

fn boolean(v: &str, key: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got '{v}'"))),
    }
}

fn parse_methods(v: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for part in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Method = part.parse()?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    methods.sort();
    Ok(methods)
}
