use crate::potential::PotentialKind;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("perturbation exponent p = {p} is below the minimum {min} for {kind}")]
    InvalidPower {
        kind: PotentialKind,
        p: u32,
        min: u32,
    },
    #[error("{name} must be positive and finite (got {value})")]
    InvalidParameter { name: &'static str, value: f64 },
}

/// Failures of the moment recursion. Apart from [`EngineError::InvalidIndex`]
/// and [`EngineError::InvalidColumn`], these indicate internal inconsistency.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("recursion index {index} is outside the valid range (index >= 0)")]
    InvalidIndex { index: i64 },
    #[error("column request invalid: {0}")]
    InvalidColumn(String),
    #[error("moment entry (j = {j}, k = {k}) was read before it was computed")]
    MissingEntry { j: i64, k: usize },
    #[error("division by zero in the recursion at (j = {j}, k = {k})")]
    DivisionHazard { j: i64, k: usize },
    #[error("hypervirial balance violated at (j = {j}, k = {k})")]
    HypervirialResidual { j: i64, k: usize },
    #[error("normalization moment is wrong in column {k}")]
    Normalization { k: usize },
    #[error("k * eps(k) differs from the Hellmann-Feynman moment at k = {k}")]
    HellmannFeynman { k: usize },
    #[error("coefficient eps({k}) does not have sign (-1)^(k+1)")]
    SignAlternation { k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the polynomial ansatz only covers nodeless states (n = 0), got n = {n}")]
    UnsupportedState { n: u32 },
    #[error("order {order} exceeds the oracle limit {limit}")]
    OrderLimit { order: usize, limit: usize },
    #[error("order {order}: {unknowns} unknowns but {equations} coefficient equations")]
    Counting {
        order: usize,
        unknowns: usize,
        equations: usize,
    },
    #[error("order {order}: residual of the x^{power} coefficient equation is nonzero")]
    Residual { order: usize, power: i64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("series has {len} coefficients, need at least {needed}")]
    SeriesTooShort { len: usize, needed: usize },
    #[error("coefficient eps({k}) is zero; ratio undefined")]
    DegenerateSeries { k: usize },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("asymptotic fit unreliable: {reason}")]
    FitUnreliable {
        reason: String,
        diagnostics: Box<crate::analysis::FitDiagnostics>,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no eigenvalue bracket found: {0}")]
    BracketNotFound(String),
    #[error("eigenvalue search did not converge: {0}")]
    NonConvergence(String),
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("coefficient {index}: {source}")]
    Coefficient {
        index: usize,
        source: crate::exact::ParseRationalError,
    },
    #[error("malformed csv: {0}")]
    Csv(String),
    #[error("document declares r0 = {r0} but carries {count} coefficients")]
    CountMismatch { r0: usize, count: usize },
    #[error("cached prefix differs from the fresh computation at k = {k}")]
    CachePrefixMismatch { k: usize },
    #[error("cached document describes a different series")]
    CacheIdentity,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("no orders to benchmark")]
    NoOrders,
    #[error("at least one timed repetition is required")]
    NoRepeats,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("the two methods disagree at r0 = {r0}")]
    Disagreement { r0: usize },
}
