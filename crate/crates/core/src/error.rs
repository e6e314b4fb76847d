use thiserror::Error;

/// Errors shared by all certification pipelines.
///
/// Variants mirror the failure modes of the contracts: input-shape problems,
/// hypothesis/threshold violations that make a certificate meaningless, and
/// honest certification failures (the check ran and the property does not hold).
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("network is not minimal: {0}")]
    NotMinimal(String),

    #[error("network is not alignable to the hexagonal directions: {0}")]
    NotAlignable(String),

    #[error("threshold violation: {0}")]
    ThresholdViolation(String),

    #[error("domain boundary not transverse: {0}")]
    NonTransverse(String),

    #[error("no proper three-coloring of the region adjacency graph: {0}")]
    NoColoring(String),

    #[error("inconsistent field assignment: {0}")]
    InconsistentAssignment(String),

    #[error("calibration failure: {0}")]
    CalibrationFailure(String),

    #[error("invalid comparison: {0}")]
    InvalidComparison(String),

    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("exact arithmetic: {0}")]
    ExactArithmetic(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
