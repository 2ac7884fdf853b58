use mmloco_core::{GeometryError, PlannerError, SimError};
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const UNREACHABLE: i32 = 2;
    pub const MISSION_FAILURE: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("goal is unreachable from start")]
    Unreachable,
    #[error("mission failed at waypoint {waypoint}: {reason}")]
    MissionFailed { waypoint: usize, reason: String },
    #[error("simulation error: {0}")]
    Simulation(SimError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Simulation(_) => exit::INPUT,
            CliError::Unreachable => exit::UNREACHABLE,
            CliError::MissionFailed { .. } => exit::MISSION_FAILURE,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("JSON error: {e}"))
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PlannerError> for CliError {
    fn from(e: PlannerError) -> Self {
        match e {
            PlannerError::Unreachable => CliError::Unreachable,
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::MissionFailure { waypoint, reason } => CliError::MissionFailed { waypoint, reason },
            SimError::InvalidPlan(msg) => CliError::Input(format!("invalid plan: {msg}")),
            other => CliError::Simulation(other),
        }
    }
}
