use thiserror::Error;

/// Errors raised by the numerical kernel and the simulation drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not in se(3): {0}")]
    NotInAlgebra(String),
    #[error("matrix is not in SE(3): {0}")]
    NotInGroup(String),
    #[error("logarithm near its branch cut: rotation angle {angle} is within {margin} of pi")]
    NearSingular { angle: f64, margin: f64 },
    #[error("metric is not symmetric positive definite: {0}")]
    SingularMetric(String),
    #[error("grid too coarse: {n} points, at least {min} required")]
    GridTooCoarse { n: usize, min: usize },
    #[error("time step {dt} exceeds the stability bound {bound}")]
    CflViolated { dt: f64, bound: f64 },
    #[error("insufficient history: {have} time slices, {need} required")]
    InsufficientHistory { have: usize, need: usize },
    #[error("non-finite value in state component {index}")]
    NonFiniteState { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
