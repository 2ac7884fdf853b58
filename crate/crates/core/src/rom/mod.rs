//! Reduced-order model: one rigid body, four massless three-joint legs,
//! compliant ground and leg-mounted thrusters.

pub mod contact;
pub mod dynamics;
pub mod kinematics;
pub mod params;
pub mod power;

pub use contact::{ground_reaction, stribeck_coefficient};
pub use dynamics::{
    accelerations, bias_forces, foot_position, foot_velocity, generalized_forces, kinetic_energy, mass_matrix,
    point_velocity, step, step_with, thruster_position, BodyState, ForceSet, RobotState,
};
pub use kinematics::{LegJoint, LegKinematics};
pub use params::{GroundModel, RobotParams, GRAVITY};
pub use power::{joint_power, leg_torques, rectified_power};
