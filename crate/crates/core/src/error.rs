use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CkpError {
    #[error("mode index must be an odd doubled value, got {0}")]
    EvenDoubledIndex(i64),
    #[error("cannot parse half-integer from {0:?}")]
    ParseHalf(String),
    #[error("malformed monomial: {0}")]
    MalformedMonomial(String),
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("operator output escaped the probe window (degree {found_doubled}/2 > {window_doubled}/2)")]
    ProbeEscape { found_doubled: u32, window_doubled: u32 },
    #[error("eigenbasis at doubled degree {doubled_degree} has rank {rank}, expected {expected}")]
    RankDeficient { doubled_degree: u32, rank: usize, expected: usize },
    #[error("vector is not an eigenvector of {0}")]
    NotEigenvector(String),
    #[error("series inverse needs an invertible constant term and no other weight-zero terms")]
    NonUnitConstant,
    #[error("sum terms must have strictly increasing declared valuation")]
    NonIncreasingValuation,
    #[error("series term {0:?} has negative weight under the active grading")]
    NegativeWeight(Vec<i32>),
    #[error("expansion parameter {0:?} must have positive weight")]
    NonPositiveParameter(Vec<i32>),
    #[error("series are over different variables or gradings")]
    IncompatibleSeries,
    #[error("declared slack {slack} exceeds the supplied window {window}")]
    WindowTooSmall { slack: i64, window: i64 },
    #[error("quadratic generator is not degree-raising on the pair ({0}, {1})")]
    NotDegreeRaising(String, String),
    #[error("commutator residual is not a scalar multiple of the identity")]
    NonScalarResidual,
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
}

pub type Result<T> = std::result::Result<T, CkpError>;
