use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sensor {index}: weight must be positive, got {weight}")]
    NonPositiveWeight { index: usize, weight: f64 },

    #[error("sensor {index}: channel ON probability must lie in [0, 1], got {p}")]
    ProbabilityOutOfRange { index: usize, p: f64 },

    #[error("system must contain at least one sensor")]
    EmptySystem,

    #[error("cannot summarize a run of zero slots")]
    ZeroSlots,

    #[error("parameter solver needs at least one sensor")]
    EmptySet,

    #[error("sensor {index}: channel ON probability must be positive for this solver, got {p}")]
    NonPositiveProbability { index: usize, p: f64 },

    #[error("randomized parameters do not match the system: {0}")]
    ParamMismatch(String),

    #[error("scheduling probability must lie in (0, 1], got {0}")]
    ZeroParam(f64),

    #[error("length mismatch: {left} weights vs {right} probabilities")]
    LengthMismatch { left: usize, right: usize },

    #[error("value iteration did not converge in {iterations} sweeps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("index equation is degenerate at age {age}")]
    DegenerateEquation { age: u64 },

    #[error("idle set at charge {larger} does not contain the idle set at charge {smaller} (state {state})")]
    MonotonicityViolation { smaller: f64, larger: f64, state: usize },

    #[error("optimal actions are not of threshold type (state {state})")]
    NotThreshold { state: usize },

    #[error("Δ must lie in (0, 1], got {0}")]
    ZeroDelta(f64),

    #[error("α must lie in (0, 1], got {0}")]
    ZeroAlpha(f64),

    #[error("policy does not fit the system: {0}")]
    PolicySpecMismatch(String),

    #[error("horizon must be at least one slot")]
    ZeroHorizon,

    #[error("at least one replication is required")]
    ZeroReplications,

    #[error("bad sweep parameter path `{0}`")]
    BadParameterPath(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
