//! Closed-loop simulation of a planned mission on the reduced-order model.
//!
//! The runner ticks at 1 kHz. Walking uses a trot with a foot-space servo
//! whose reference passes through the governor; flight uses a cascaded
//! position/attitude controller; transformations are timed joint sequences.

pub mod calibrate;
pub mod flight;
pub mod gait;
pub mod log;
pub mod mission;
pub mod physics;
pub mod stance;
pub mod transform;

pub use calibrate::{calibrate, Calibration};
pub use flight::{FlightParams, FlightReference, PolylineTrajectory};
pub use log::{reintegrate, write_governor_csv, write_trajectory_csv, LedgerReport};
pub use gait::{GaitParams, StepCommand, TrotGait};
pub use mission::{
    body_target, run_mission, Abort, GovernorTraceRow, LocoMode, LogRow, MissionLog, MissionResult, Runner, SegmentLedger,
    SimParams,
};
pub use stance::{run_stance_shift, LateralShift, StanceOutcome};
pub use transform::{transform_sequence, TransformDirection};
