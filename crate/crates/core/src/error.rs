use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),
    #[error("sampling budget of {attempts} attempts exhausted while drawing {mode} nodes")]
    SamplingBudget { mode: &'static str, attempts: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("Euler-rate map is singular (|det H| = {det:.3e}, pitch = {pitch:.4} rad)")]
    Singular { det: f64, pitch: f64 },
    #[error("integration diverged at t = {time:.4} s")]
    Diverged { time: f64 },
    #[error("invalid step size {0}")]
    InvalidStep(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GovernorError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("weight matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("invalid gain or step: {0}")]
    InvalidGain(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlannerError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),
    #[error("node {0} is not in the graph")]
    UnknownNode(usize),
    #[error("grid would contain {0} nodes, above the 10^6 guard")]
    GridTooLarge(usize),
    #[error("goal is unreachable from start")]
    Unreachable,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Governor(#[from] GovernorError),
    #[error("mission failed at waypoint {waypoint}: {reason}")]
    MissionFailure { waypoint: usize, reason: String },
    #[error("transformation aborted: body tilt {tilt_deg:.1} deg exceeds limit")]
    TransformAborted { tilt_deg: f64 },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
}
