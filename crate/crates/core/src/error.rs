use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("matrix is not positive definite (pivot {pivot} is not positive)")]
    NotPositiveDefinite { pivot: usize },

    #[error("invalid range [{lo}, {hi})")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("empty {0} domain")]
    EmptyDomain(&'static str),

    #[error("class mismatch: {0}")]
    ClassMismatch(String),

    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error("ragged rows: row {row} has {got} fields, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("empty file: {0}")]
    EmptyFile(PathBuf),

    #[error("class {class} has {have} samples, {need} required")]
    InsufficientClassSamples {
        class: usize,
        have: usize,
        need: usize,
    },

    #[error("rank deficient: requested {requested} components, numerical rank {rank}")]
    RankDeficient { requested: usize, rank: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Broad failure category, used to pick a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numeric,
}

impl Error {
    pub(crate) fn dims(op: &'static str, expected: impl ToString, got: impl ToString) -> Self {
        Error::DimensionMismatch {
            op,
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::Trial { source, .. } => source.kind(),
            Error::DimensionMismatch { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::InvalidRange { .. }
            | Error::InvalidDimension(_)
            | Error::NonFinite(_)
            | Error::RankDeficient { .. } => ErrorKind::Numeric,
            _ => ErrorKind::Data,
        }
    }

    /// Exit code for the command-line tool: 2 config, 3 data, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Numeric => 4,
        }
    }
}
