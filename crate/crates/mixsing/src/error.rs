use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid subdivision: N = {0}, need N >= 2")]
    InvalidSubdivision(usize),
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("invalid sample at node {index} ({coords:?}): {value}")]
    InvalidSample {
        index: usize,
        coords: Vec<f64>,
        value: f64,
    },
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),
    #[error("invalid fractional order s = {0}, need s in (0,1)")]
    InvalidOrder(f64),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("dense nonlocal matrix cap exceeded: {nodes} interior nodes > {cap}")]
    DenseCapExceeded { nodes: usize, cap: usize },
    #[error("solver did not converge within {iterations} Newton steps (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("monotonicity violation: {0}")]
    MonotonicityViolation(String),
    #[error("scheme fidelity violation: {0}")]
    SchemeFidelity(String),
    #[error("out of case: {0}")]
    OutOfCase(String),
    #[error("outside theory: {0}")]
    OutsideTheory(String),
    #[error("measure mismatch: {0}")]
    MeasureMismatch(String),
    #[error("empty input")]
    EmptyInput,
    #[error("invalid exponent p = {0}, need p >= 1")]
    InvalidExponent(f64),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
