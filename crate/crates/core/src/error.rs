//! Error types for every stage of the pipeline.
//!
//! Each module has its own error enum; [`Error`] unifies them for the
//! command-line front end, which needs a stable tag and exit code per
//! failure class.

use std::path::PathBuf;

use thiserror::Error;

/// Loading, cleaning and splitting tabular data.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("non-numeric value {value:?} at line {line}, column {column:?}")]
    NonNumeric {
        line: usize,
        column: String,
        value: String,
    },
    #[error("duplicate year {0}")]
    DuplicateYear(i64),
    #[error("need at least {required} data rows, found {found}")]
    TooFewRows { required: usize, found: usize },
    #[error("column {0:?} has no observed values")]
    UnimputableColumn(String),
    #[error("k={k} exceeds the {available} candidate rows observed in column {column:?}")]
    NotEnoughNeighbors {
        column: String,
        k: usize,
        available: usize,
    },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("missing value in year {year}, column {column:?}")]
    MissingValue { year: i64, column: String },
    #[error("feature {0:?} is constant and cannot be normalized")]
    DegenerateFeature(String),
    #[error("train fraction {0} is not in (0, 1)")]
    InvalidFraction(f64),
    #[error("split of {n} rows leaves an empty partition ({train} train / {test} test)")]
    EmptyPartition { n: usize, train: usize, test: usize },
    #[error("feature value {value} in column {column:?} lies outside [0, 1]")]
    NotNormalized { column: String, value: f64 },
    #[error("non-finite value in column {0:?}")]
    NonFinite(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("columns do not match the model: {0}")]
    SchemaMismatch(String),
}

/// Forest training, querying and persistence.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForestError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("invalid forest configuration: {0}")]
    InvalidConfig(String),
    #[error("query has {found} features, forest expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no tree has out-of-bag rows (was the forest trained without bootstrap?)")]
    NoOobSamples,
    #[error("grid is empty")]
    EmptyGrid,
    #[error("feature index {index} out of range for {count} features")]
    FeatureOutOfRange { index: usize, count: usize },
    #[error("data does not match the forest's training set: {0}")]
    TrainingDataMismatch(String),
    #[error("unsupported model format version {0}")]
    UnsupportedFormatVersion(u32),
    #[error("invalid model document: {0}")]
    InvalidModel(String),
}

/// Conditional distribution queries.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QrfError {
    #[error("quantile level {0} is not in (0, 1)")]
    InvalidTau(f64),
    #[error("confidence level {0} is not in (0, 1)")]
    InvalidLevel(f64),
    #[error("quantile levels must be strictly increasing")]
    UnsortedTaus,
    #[error("weights and targets must be nonempty, equal-length, non-negative and have positive total")]
    InvalidWeights,
    #[error(transparent)]
    Forest(#[from] ForestError),
}

/// Kernel density estimation and bandwidth selection.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KdeError {
    #[error("no samples")]
    EmptySamples,
    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),
    #[error("samples have zero spread")]
    DegenerateSample,
    #[error("need at least {required} samples, found {found}")]
    TooFewSamples { required: usize, found: usize },
    #[error("evaluation grid must be nonempty and strictly increasing")]
    InvalidGrid,
    #[error("need at least {required} {what}, got {found}")]
    TooCoarse {
        what: &'static str,
        required: usize,
        found: usize,
    },
    #[error(transparent)]
    Qrf(#[from] QrfError),
}

/// Forecast evaluation metrics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("inputs are empty")]
    Empty,
    #[error("length mismatch: {observed} observed vs {predicted} predicted")]
    LengthMismatch { observed: usize, predicted: usize },
    #[error("observed value is zero at index {0}")]
    ZeroDenominator(usize),
    #[error("observed values have zero variance")]
    ZeroVariance,
    #[error("need at least {required} points, found {found}")]
    TooFewPoints { required: usize, found: usize },
    #[error("quantile level {0} is not in (0, 1)")]
    InvalidTau(f64),
    #[error("target range must be positive, got {0}")]
    NonPositiveRange(f64),
}

/// Unified error for the command-line pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Qrf(#[from] QrfError),
    #[error(transparent)]
    Kde(#[from] KdeError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable tag naming the failure.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Io { .. } => "IoError",
            Error::Config(_) => "ConfigError",
            Error::Data(e) => match e {
                DataError::MalformedCsv(_) => "MalformedCsv",
                DataError::NonNumeric { .. } => "NonNumeric",
                DataError::DuplicateYear(_) => "DuplicateYear",
                DataError::TooFewRows { .. } => "TooFewRows",
                DataError::UnimputableColumn(_) => "UnimputableColumn",
                DataError::NotEnoughNeighbors { .. } => "NotEnoughNeighbors",
                DataError::InvalidK => "InvalidK",
                DataError::MissingValue { .. } => "MissingValue",
                DataError::DegenerateFeature(_) => "DegenerateFeature",
                DataError::InvalidFraction(_) => "InvalidFraction",
                DataError::EmptyPartition { .. } => "EmptyPartition",
                DataError::NotNormalized { .. } => "NotNormalized",
                DataError::NonFinite(_) => "NonFinite",
                DataError::Shape(_) => "ShapeMismatch",
                DataError::SchemaMismatch(_) => "SchemaMismatch",
            },
            Error::Forest(e) => match e {
                ForestError::EmptyTrainingSet => "EmptyTrainingSet",
                ForestError::InvalidConfig(_) => "InvalidConfig",
                ForestError::DimensionMismatch { .. } => "DimensionMismatch",
                ForestError::NoOobSamples => "NoOobSamples",
                ForestError::EmptyGrid => "EmptyGrid",
                ForestError::FeatureOutOfRange { .. } => "FeatureOutOfRange",
                ForestError::TrainingDataMismatch(_) => "TrainingDataMismatch",
                ForestError::UnsupportedFormatVersion(_) => "UnsupportedFormatVersion",
                ForestError::InvalidModel(_) => "InvalidModel",
            },
            Error::Qrf(e) => match e {
                QrfError::InvalidTau(_) => "InvalidTau",
                QrfError::InvalidLevel(_) => "InvalidLevel",
                QrfError::UnsortedTaus => "UnsortedTaus",
                QrfError::InvalidWeights => "InvalidWeights",
                QrfError::Forest(inner) => Error::Forest(inner.clone()).tag(),
            },
            Error::Kde(e) => match e {
                KdeError::EmptySamples => "EmptySamples",
                KdeError::InvalidBandwidth(_) => "InvalidBandwidth",
                KdeError::DegenerateSample => "DegenerateSample",
                KdeError::TooFewSamples { .. } => "TooFewSamples",
                KdeError::InvalidGrid => "InvalidGrid",
                KdeError::TooCoarse { .. } => "TooCoarse",
                KdeError::Qrf(inner) => Error::Qrf(inner.clone()).tag(),
            },
            Error::Metrics(e) => match e {
                MetricsError::Empty => "Empty",
                MetricsError::LengthMismatch { .. } => "LengthMismatch",
                MetricsError::ZeroDenominator(_) => "ZeroDenominator",
                MetricsError::ZeroVariance => "ZeroVariance",
                MetricsError::TooFewPoints { .. } => "TooFewPoints",
                MetricsError::InvalidTau(_) => "InvalidTau",
                MetricsError::NonPositiveRange(_) => "NonPositiveRange",
            },
        }
    }

    /// Process exit code: 2 for I/O, 3 for data or configuration
    /// validation, 4 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::Kde(KdeError::DegenerateSample)
            | Error::Kde(KdeError::InvalidBandwidth(_))
            | Error::Metrics(MetricsError::ZeroDenominator(_))
            | Error::Metrics(MetricsError::ZeroVariance)
            | Error::Metrics(MetricsError::NonPositiveRange(_)) => 4,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
