use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("non-invertible germ")]
    NonInvertible,
    #[error("no rational square root")]
    NoSquareRoot,
    #[error("singular gauge")]
    SingularGauge,
    #[error("indeterminate order at this precision")]
    IndeterminateOrder,
    #[error("invalid Higgs data: {0}")]
    InvalidHiggs(String),
    #[error("inconsistent Hecke data: {0}")]
    InconsistentHecke(String),
    #[error("invalid Hecke parameter: {0}")]
    InvalidParam(String),
    #[error("mismatched order: {0} vs {1}")]
    MismatchedOrder(i64, i64),
    #[error("point stratum, no coordinates")]
    PointStratum,
    #[error("chart membership violated: {0}")]
    ChartMembership(String),
    #[error("excluded locus: {0}")]
    ExcludedLocus(String),
    #[error("datum degenerates to the sigma-side twist")]
    DegenerateDatum,
    #[error("weight mismatch")]
    WeightMismatch,
    #[error("invalid weighted point: {0}")]
    InvalidPoint(String),
    #[error("zero torus scalar")]
    ZeroScalar,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("hypothesis not asserted")]
    HypothesisNotAsserted,
    #[error("not covered: {0}")]
    NotCovered(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
