use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DomainDataset;
use crate::error::{Error, Result};
use crate::numerics::rng::{STREAM_SOURCE_SPLIT, STREAM_TARGET_SPLIT};
use crate::numerics::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub source_per_class: usize,
    pub target_labeled_per_class: usize,
    pub trial_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Target,
}

impl Role {
    fn stream(self) -> u64 {
        match self {
            Role::Source => STREAM_SOURCE_SPLIT,
            Role::Target => STREAM_TARGET_SPLIT,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Source => "source",
            Role::Target => "target",
        })
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(Role::Source),
            "target" => Ok(Role::Target),
            _ => Err(Error::Config(format!("unknown role '{s}'"))),
        }
    }
}

/// Row indices chosen for one domain in one trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub role: Role,
    pub seed: u64,
    pub per_class: usize,
    /// `selected[k]` are the training rows of class `k`, ascending.
    pub selected: Vec<Vec<usize>>,
    /// Rows left for testing, ascending. Always empty for a source domain.
    pub test: Vec<usize>,
}

impl SplitIndices {
    /// Training rows grouped by class, class 0 first.
    pub fn train(&self) -> Vec<usize> {
        self.selected.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone)]
pub struct Split {
    pub train: DomainDataset,
    pub test: DomainDataset,
    pub indices: SplitIndices,
}

/// Draws the per-class row indices without building the subsets.
///
/// Within each class the rows are shuffled by a generator seeded with
/// `trial_seed` on the role's stream, and the first `per_class` are kept.
pub fn split_indices(ds: &DomainDataset, spec: &SplitSpec, role: Role) -> Result<SplitIndices> {
    let need = match role {
        Role::Source => spec.source_per_class,
        Role::Target => spec.target_labeled_per_class,
    };
    if need == 0 {
        return Err(Error::Config(format!("{role} per-class count must be at least 1")));
    }
    let mut by_class = vec![Vec::new(); ds.class_count];
    for (i, &y) in ds.y.iter().enumerate() {
        by_class[y].push(i);
    }
    if let Some((class, rows)) = by_class.iter().enumerate().find(|(_, rows)| rows.len() < need) {
        return Err(Error::InsufficientClassSamples {
            class,
            have: rows.len(),
            need,
        });
    }
    let mut rng = SeededRng::with_stream(spec.trial_seed, role.stream());
    let mut taken = vec![false; ds.len()];
    let selected: Vec<Vec<usize>> = by_class
        .into_iter()
        .map(|mut rows| {
            rng.shuffle(&mut rows);
            rows.truncate(need);
            rows.sort_unstable();
            for &i in &rows {
                taken[i] = true;
            }
            rows
        })
        .collect();
    let test = match role {
        Role::Source => Vec::new(),
        Role::Target => (0..ds.len()).filter(|&i| !taken[i]).collect(),
    };
    Ok(SplitIndices {
        role,
        seed: spec.trial_seed,
        per_class: need,
        selected,
        test,
    })
}

/// Stratified train/test split. A target domain keeps every unselected row
/// for testing; a source domain gets an empty test set.
pub fn sample_split(ds: &DomainDataset, spec: &SplitSpec, role: Role) -> Result<Split> {
    let indices = split_indices(ds, spec, role)?;
    Ok(Split {
        train: ds.subset(&indices.train()),
        test: ds.subset(&indices.test),
        indices,
    })
}

/// Renders a manifest: header lines, then one `class <k>:` line per class
/// listing the selected row indices (0-based, in file order).
pub fn manifest_text(dataset: &str, split: &SplitIndices) -> String {
    let mut out = format!(
        "# split manifest\ndataset {dataset}\nrole {}\nseed {}\nper_class {}\n",
        split.role, split.seed, split.per_class
    );
    for (k, rows) in split.selected.iter().enumerate() {
        let list: Vec<String> = rows.iter().map(usize::to_string).collect();
        out.push_str(&format!("class {k}: {}\n", list.join(" ")));
    }
    out.push_str(&format!("test_count {}\n", split.test.len()));
    out
}

pub fn write_manifest(path: impl AsRef<Path>, dataset: &str, split: &SplitIndices) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, manifest_text(dataset, split)).map_err(|e| Error::io(path, e))
}

/// Parses [`manifest_text`] output back into `(dataset, role, seed,
/// per_class, selected)`.
pub fn parse_manifest(text: &str) -> Result<(String, Role, u64, usize, Vec<Vec<usize>>)> {
    let bad = |line: usize, msg: &str| Error::Parse {
        row: line,
        col: 0,
        msg: msg.to_string(),
    };
    let mut dataset = None;
    let mut role = None;
    let mut seed = None;
    let mut per_class = None;
    let mut selected = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        match key {
            "dataset" => dataset = Some(rest.to_string()),
            "role" => role = Some(rest.parse::<Role>().map_err(|_| bad(n, "bad role"))?),
            "seed" => seed = Some(rest.parse::<u64>().map_err(|_| bad(n, "bad seed"))?),
            "per_class" => per_class = Some(rest.parse::<usize>().map_err(|_| bad(n, "bad per_class"))?),
            "test_count" => {}
            "class" => {
                let (k, rows) = rest.split_once(':').ok_or_else(|| bad(n, "missing ':'"))?;
                if k.trim().parse::<usize>().ok() != Some(selected.len()) {
                    return Err(bad(n, "classes out of order"));
                }
                let rows = rows
                    .split_whitespace()
                    .map(|r| r.parse::<usize>().map_err(|_| bad(n, "bad row index")))
                    .collect::<Result<Vec<_>>>()?;
                selected.push(rows);
            }
            _ => return Err(bad(n, "unknown key")),
        }
    }
    match (dataset, role, seed, per_class) {
        (Some(d), Some(r), Some(s), Some(p)) => Ok((d, r, s, p, selected)),
        _ => Err(bad(0, "incomplete manifest header")),
    }
}
