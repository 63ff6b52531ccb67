use alloc::string::String;

/// Errors produced by fitting, resampling and selection routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("column {0} has zero variance")]
    ZeroVarianceColumn(usize),
    #[error("input contains non-finite values")]
    NonFiniteInput,
    #[error("no remaining covariance between predictors and response")]
    DegenerateDirection,
    #[error("requested {requested} components but only {available} can be built")]
    TooManyComponents { requested: usize, available: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("only {finite} finite bootstrap replicates, {required} required")]
    TooFewReplicates { finite: usize, required: usize },
    #[error("no sparsity value produced a significant component")]
    NoValidEta,
    #[error("no predictor is significant")]
    EmptySupport,
    #[error("logistic fit diverged (separation)")]
    SeparationDivergence,
    #[error("response must contain both 0 and 1 and nothing else")]
    NonBinaryResponse,
    #[error("group boundaries are not integral: {0}")]
    BoundaryNotIntegral(String),
    #[error("at least two non-empty classes are required")]
    SingleClass,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
