//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Model parameters violate a construction invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// State-space enumeration would exceed the configured cap.
    #[error("state space exceeds the cap of {cap} states (at least {seen} found); raise the cap explicitly to proceed")]
    CapacityExceeded { cap: usize, seen: usize },

    /// Vector length does not match the expected dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Operation requires a model feature the instance lacks (e.g. γ_k > 0 or μ_k > 0).
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// Iterative solver did not reach its tolerance; carries the last iterate.
    #[error("no convergence after {iterations} iterations (last iterate {last:?}, gap {gap:e})")]
    NonConvergence {
        iterations: usize,
        last: Vec<f64>,
        gap: f64,
    },

    /// ODE step produced a negative component too large to clamp.
    #[error("integration step produced a negative component of magnitude {magnitude:e} (> 1e-9); retry with a smaller step")]
    StepClamp { magnitude: f64 },

    /// Operation defined only on the interior of the simplex.
    #[error("interior-only operation: component {index} is zero")]
    InteriorRequired { index: usize },

    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Precondition on the argument not met.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Designer inequality fails.
    #[error("design condition violated: {0}")]
    ConditionViolated(String),

    /// Statistical estimator got too few samples.
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// I/O or serialization failure (CLI surfaces).
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
