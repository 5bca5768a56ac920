use thiserror::Error;

/// Errors raised while reading or validating lightcurve data.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("input contains no data rows")]
    EmptyInput,
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: measurement error must be positive, got {value}")]
    NonPositiveError { line: usize, value: f64 },
    #[error("curve {id}: {n} usable observations, at least {min} required")]
    TooFewObservations { id: String, n: usize, min: usize },
    #[error("curve {id}: observation times are not sorted")]
    UnsortedTimes { id: String },
    #[error("curve {id}: non-finite value in {field}")]
    NonFiniteValue { id: String, field: &'static str },
    #[error("config line {line}: {reason}")]
    BadConfig { line: usize, reason: String },
}

impl DataError {
    pub fn code(&self) -> &'static str {
        match self {
            DataError::EmptyInput => "EmptyInput",
            DataError::MalformedRow { .. } => "MalformedRow",
            DataError::NonPositiveError { .. } => "NonPositiveError",
            DataError::TooFewObservations { .. } => "TooFewObservations",
            DataError::UnsortedTimes { .. } => "UnsortedTimes",
            DataError::NonFiniteValue { .. } => "NonFiniteValue",
            DataError::BadConfig { .. } => "BadConfig",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("reference set contains no non-transient lightcurves")]
    NoNonTransients,
    #[error("covariance factorization failed even with inflated jitter")]
    FactorizationFailure,
    #[error("observations span zero time")]
    DegenerateSpan,
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),
    #[error("grid needs at least 2 points, got {0}")]
    InvalidGrid(usize),
}

impl GpError {
    pub fn code(&self) -> &'static str {
        match self {
            GpError::NoNonTransients => "NoNonTransients",
            GpError::FactorizationFailure => "FactorizationFailure",
            GpError::DegenerateSpan => "DegenerateSpan",
            GpError::InvalidHyperparameters(_) => "InvalidHyperparameters",
            GpError::InvalidGrid(_) => "InvalidGrid",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("curve {id}: measure {measure} is not finite ({value})")]
    NonFiniteMeasure {
        id: String,
        measure: &'static str,
        value: f64,
    },
    #[error(transparent)]
    Gp(#[from] GpError),
}

impl FeatureError {
    pub fn code(&self) -> &'static str {
        match self {
            FeatureError::NonFiniteMeasure { .. } => "NonFiniteMeasure",
            FeatureError::Gp(e) => e.code(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("dataset has {0} rows, too few to split")]
    DatasetTooSmall(usize),
    #[error("training data contains a single class")]
    SingleClass,
    #[error("pooled covariance is singular after ridge")]
    SingularCovariance,
    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("required class {0:?} is missing")]
    MissingClass(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite feature value in row {row}, column {column}")]
    MissingValue { row: usize, column: String },
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("model format: {0}")]
    ModelFormat(String),
}

impl ClassifyError {
    pub fn code(&self) -> &'static str {
        match self {
            ClassifyError::DatasetTooSmall(_) => "DatasetTooSmall",
            ClassifyError::SingleClass => "SingleClass",
            ClassifyError::SingularCovariance => "SingularCovariance",
            ClassifyError::DimensionMismatch { .. } => "DimensionMismatch",
            ClassifyError::MissingClass(_) => "MissingClass",
            ClassifyError::InvalidParameter(_) => "InvalidParameter",
            ClassifyError::MissingValue { .. } => "MissingValue",
            ClassifyError::UnknownFeature(_) => "UnknownFeature",
            ClassifyError::ModelFormat(_) => "ModelFormat",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("infeasible cadence: {0}")]
    InfeasibleSpec(String),
    #[error("{0} times supplied, at least 5 required")]
    TooFewTimes(usize),
}

impl SynthError {
    pub fn code(&self) -> &'static str {
        match self {
            SynthError::InfeasibleSpec(_) => "InfeasibleSpec",
            SynthError::TooFewTimes(_) => "TooFewTimes",
        }
    }
}

/// Umbrella error for pipeline code that crosses module boundaries.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

impl Error {
    /// Stable identifier for machine-readable error reporting.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Data(e) => e.code(),
            Error::Gp(e) => e.code(),
            Error::Feature(e) => e.code(),
            Error::Classify(e) => e.code(),
            Error::Synth(e) => e.code(),
        }
    }
}
