use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("value {value} outside the admissible domain of the potential (order {order})")]
    Domain { value: f64, order: u8 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverNonConvergence { iterations: usize, residual: f64 },

    #[error("singular matrix encountered at pivot {pivot}")]
    SingularMatrix { pivot: usize },

    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("iterate reached the pure-phase guard (|phi| = {value})")]
    BoundsViolation { value: f64 },

    #[error("energy inequality violated by {excess:e}")]
    EnergyIncrease { excess: f64 },

    #[error("time step floor reached at t = {t} (dt = {dt:e})")]
    StepFloor { t: f64, dt: f64 },

    #[error("converged state is not separated from the pure phases (delta = {delta})")]
    SeparationFailure { delta: f64 },

    #[error("bad-time measure {measure} exceeds the bound {bound} at M = {m}")]
    BoundViolation { m: f64, measure: f64, bound: f64 },

    #[error("y0 = {y0} exceeds the threshold {threshold}")]
    ConditionNotMet { y0: f64, threshold: f64 },

    #[error("window out of range: {0}")]
    WindowOutOfRange(String),

    #[error("insufficient snapshots: need {needed}, have {available}")]
    InsufficientSnapshots { needed: usize, available: usize },

    #[error("degenerate fit window: {usable} usable samples (need at least {needed})")]
    DegenerateWindow { usable: usize, needed: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
