use thiserror::Error;

use crate::lattice::Site;

/// Errors raised by the sampling, topology and estimation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("site {0} lies outside the domain")]
    SiteOutsideDomain(Site),
    #[error("rejection budget of {budget} attempts exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("site set is not equal to its own filling")]
    NotFilled,
    #[error("site set is not 4-connected")]
    NotConnected,
    #[error("empty subset")]
    EmptySubset,
    #[error("no complete cluster surrounds the target point")]
    NoSurroundingCluster,
    #[error("tries exhausted after {tries} draws ({accepted} accepted)")]
    TriesExhausted { tries: u64, accepted: u64 },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("degenerate estimate: {0}")]
    Degenerate(String),
    #[error("hull touches the attachment arc (eps = {eps}, a = {a})")]
    HullTouchesArc { a: f64, eps: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("zero variance input")]
    ZeroVariance,
    #[error("conditioning event never occurred within {tries} draws")]
    ConditioningFailure { tries: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
