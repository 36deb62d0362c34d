//! Crate-wide error type.
//!
//! Every fallible operation in the library funnels into [`Error`]. The CLI
//! maps variants onto stable machine-readable kind tags via [`Error::kind`].

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("rank deficient design: pivot {pivot:.3e} at column {column} below tolerance")]
    RankDeficient { column: usize, pivot: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("data row {row}, column {column:?}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("{0}: no header row")]
    EmptyFile(PathBuf),

    #[error("column {0:?} is not numeric")]
    ColumnNotNumeric(String),

    #[error("covariance matrix is singular")]
    SingularCovariance,

    #[error("not enough rows: {0}")]
    TooFewRows(String),

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("invalid fold count: {0}")]
    InvalidK(String),

    #[error("column {0:?} is constant")]
    ConstantColumn(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("stale forward cache: {0}")]
    StaleCache(String),

    #[error("non-finite loss at epoch {epoch}: {message}")]
    NonFiniteLoss { epoch: usize, message: String },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("target has zero variance")]
    ZeroVariance,

    #[error("unknown feature {0:?}")]
    UnknownFeature(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("run directory incomplete, missing: {}", .0.join(", "))]
    IncompleteRun(Vec<String>),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an io error with the path that produced it.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable tag for machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::Domain(_) => "domain",
            Error::NonConvergence(_) => "non_convergence",
            Error::MissingColumn(_) => "missing_column",
            Error::Parse { .. } => "parse",
            Error::EmptyFile(_) => "empty_file",
            Error::ColumnNotNumeric(_) => "column_not_numeric",
            Error::SingularCovariance => "singular_covariance",
            Error::TooFewRows(_) => "too_few_rows",
            Error::DegenerateSplit(_) => "degenerate_split",
            Error::InvalidK(_) => "invalid_k",
            Error::ConstantColumn(_) => "constant_column",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::StaleCache(_) => "stale_cache",
            Error::NonFiniteLoss { .. } => "non_finite_loss",
            Error::LengthMismatch(_) => "length_mismatch",
            Error::ZeroVariance => "zero_variance",
            Error::UnknownFeature(_) => "unknown_feature",
            Error::InvalidRange(_) => "invalid_range",
            Error::IncompleteRun(_) => "incomplete_run",
            Error::InvalidConfig(_) => "config",
            Error::Fold { source, .. } => source.kind(),
        }
    }
}
