use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Labeled samples of one domain. Labels are dense in `[0, class_count)`;
/// `label_names[k]` holds the original integer label of class `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainDataset {
    pub name: String,
    pub x: DenseMatrix,
    pub y: Vec<usize>,
    pub class_count: usize,
    pub label_names: Vec<i64>,
}

impl DomainDataset {
    /// Builds a dataset whose labels are already dense; every class in
    /// `[0, class_count)` must occur.
    pub fn new(name: impl Into<String>, x: DenseMatrix, y: Vec<usize>, class_count: usize) -> Result<Self> {
        let ds = Self {
            name: name.into(),
            x,
            y,
            class_count,
            label_names: (0..class_count as i64).collect(),
        };
        ds.check_labels()?;
        if let Some(missing) = (0..class_count).find(|&c| !ds.y.contains(&c)) {
            return Err(Error::ClassMismatch(format!("class {missing} has no samples in '{}'", ds.name)));
        }
        Ok(ds)
    }

    /// Builds a dataset from arbitrary integer labels, remapping them to
    /// `[0, c)` in ascending order of the original value.
    pub fn from_raw_labels(name: impl Into<String>, x: DenseMatrix, raw: &[i64]) -> Result<Self> {
        let label_names: Vec<i64> = raw.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let dense: BTreeMap<i64, usize> = label_names.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let ds = Self {
            name: name.into(),
            x,
            y: raw.iter().map(|r| dense[r]).collect(),
            class_count: label_names.len(),
            label_names,
        };
        ds.check_labels()?;
        Ok(ds)
    }

    fn check_labels(&self) -> Result<()> {
        if self.y.len() != self.x.rows() {
            return Err(Error::dims("DomainDataset", format!("{} labels", self.x.rows()), self.y.len()));
        }
        if let Some(&label) = self.y.iter().find(|&&l| l >= self.class_count) {
            return Err(Error::LabelOutOfRange {
                label,
                classes: self.class_count,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn features(&self) -> usize {
        self.x.cols()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count];
        for &y in &self.y {
            sizes[y] += 1;
        }
        sizes
    }

    /// Rows at `indices`, keeping the class coding of `self`.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            x: self.x.select_rows(indices),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            class_count: self.class_count,
            label_names: self.label_names.clone(),
        }
    }

    /// Same labels, new features.
    pub fn with_features(&self, x: DenseMatrix) -> Result<Self> {
        if x.rows() != self.len() {
            return Err(Error::dims("with_features", format!("{} rows", self.len()), x.rows()));
        }
        Ok(Self { x, ..self.clone() })
    }
}

/// Position of the label field in each CSV record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Last,
}

/// Reads a comma-separated file. All columns except `label_column` are
/// features, in file order. Row and column indices in errors are 0-based
/// over data records (the header, if any, is not counted).
pub fn load_csv(path: impl AsRef<Path>, has_header: bool, label_column: usize) -> Result<DomainDataset> {
    load_csv_with(path, has_header, LabelColumn::Index(label_column))
}

/// [`load_csv`] with the label position given as [`LabelColumn`].
pub fn load_csv_with(path: impl AsRef<Path>, has_header: bool, label: LabelColumn) -> Result<DomainDataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut width = None;
    let mut entries = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let w = *width.get_or_insert(record.len());
        let label_column = match label {
            LabelColumn::Index(i) => i,
            LabelColumn::Last => w.saturating_sub(1),
        };
        if record.len() != w {
            return Err(Error::RaggedRows {
                row,
                expected: w,
                got: record.len(),
            });
        }
        if label_column >= w {
            return Err(Error::Parse {
                row,
                col: label_column,
                msg: format!("label column out of range for {w} columns"),
            });
        }
        for (col, field) in record.iter().enumerate() {
            if col == label_column {
                let label = field.parse::<i64>().map_err(|e| Error::Parse {
                    row,
                    col,
                    msg: format!("label '{field}': {e}"),
                })?;
                labels.push(label);
            } else {
                let v = field.parse::<f64>().map_err(|e| Error::Parse {
                    row,
                    col,
                    msg: format!("'{field}': {e}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        row,
                        col,
                        msg: format!("non-finite value '{field}'"),
                    });
                }
                entries.push(v);
            }
        }
    }
    let w = match width {
        Some(w) if !labels.is_empty() => w,
        _ => return Err(Error::EmptyFile(path.to_path_buf())),
    };
    if w < 2 {
        return Err(Error::Parse {
            row: 0,
            col: 0,
            msg: "need at least one feature column besides the label".into(),
        });
    }
    let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let x = DenseMatrix::from_row_major(labels.len(), w - 1, entries)?;
    DomainDataset::from_raw_labels(name, x, &labels)
}

/// Writes features followed by the original label in the last column, with
/// floats in shortest round-trip form so a reload is bit-exact.
pub fn save_csv(ds: &DomainDataset, path: impl AsRef<Path>, header: bool) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        if header {
            let mut names: Vec<String> = (0..ds.features()).map(|j| format!("f{j}")).collect();
            names.push("label".into());
            writeln!(out, "{}", names.join(","))?;
        }
        for i in 0..ds.len() {
            for j in 0..ds.features() {
                write!(out, "{:?},", ds.x.get(i, j))?;
            }
            writeln!(out, "{}", ds.label_names[ds.y[i]])?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.record() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            row,
            col: 0,
            msg: format!("{other:?}"),
        },
    }
}
