use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::DynamicsError;
use crate::geometry::Vec3;

pub const GRAVITY: f64 = 9.81;

/// Compliant ground and Stribeck friction coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundModel {
    /// Normal stiffness, N/m.
    pub k_gp: f64,
    /// Normal damping, N·s/m.
    pub k_gd: f64,
    /// Dry (Coulomb) coefficient.
    pub mu_c: f64,
    /// Static coefficient.
    pub mu_s: f64,
    /// Viscous coefficient, N·s/m.
    pub mu_v: f64,
    /// Stribeck velocity, m/s.
    pub v_s: f64,
}

impl Default for GroundModel {
    fn default() -> Self {
        Self { k_gp: 2.0e4, k_gd: 200.0, mu_c: 0.6, mu_s: 0.8, mu_v: 0.1, v_s: 0.05 }
    }
}

impl GroundModel {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let ok = self.k_gp > 0.0
            && self.k_gd > 0.0
            && 0.0 <= self.mu_c
            && self.mu_c <= self.mu_s
            && self.mu_v >= 0.0
            && self.v_s > 0.0;
        if ok {
            Ok(())
        } else {
            Err(DynamicsError::InvalidParams(format!("ground model {self:?}")))
        }
    }
}

/// Rigid-body and leg geometry of the morphing robot.
///
/// Legs are numbered front-left, front-right, rear-left, rear-right. Each
/// hip carries a frontal (about body x) then a sagittal (about the rotated
/// y) revolute joint and a prismatic leg-length joint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotParams {
    pub mass: f64,
    /// Body-frame inertia about the COM, kg·m².
    pub inertia: Matrix3<f64>,
    pub hips: [Vec3; 4],
    /// Distance of the thruster from the hip along the leg, m.
    pub thruster_offset: f64,
    /// Landing-gear contact points in the body frame.
    pub gear: [Vec3; 4],
    pub gravity: f64,
    pub leg_length_min: f64,
    pub leg_length_max: f64,
    /// Nominal COM height above the supporting surface while standing.
    pub stand_height: f64,
    /// Leg length used as propeller arm in the aerial configuration.
    pub uav_arm_length: f64,
    /// Leg length while crouched on the landing gear.
    pub tuck_length: f64,
    /// Maximum thrust per rotor, N.
    pub thrust_max: f64,
    /// Rotor drag torque per newton of thrust, N·m/N.
    pub yaw_torque_coeff: f64,
    /// Hover power, W. Rotor power scales with thrust^{3/2} from this value.
    pub hover_power: f64,
    /// Foot servo stiffness (1/s²) and damping (1/s), foot space.
    pub servo_kp: f64,
    pub servo_kd: f64,
    /// Foot servo speed limit, m/s.
    pub servo_speed_max: f64,
}

impl Default for RobotParams {
    fn default() -> Self {
        let (hx, hy) = (0.15, 0.10);
        let (gx, gy, gz) = (0.10, 0.08, -0.12);
        Self {
            mass: 5.0,
            inertia: Matrix3::from_diagonal(&Vec3::new(0.04, 0.06, 0.08)),
            hips: [
                Vec3::new(hx, hy, 0.0),
                Vec3::new(hx, -hy, 0.0),
                Vec3::new(-hx, hy, 0.0),
                Vec3::new(-hx, -hy, 0.0),
            ],
            thruster_offset: 0.15,
            gear: [
                Vec3::new(gx, gy, gz),
                Vec3::new(gx, -gy, gz),
                Vec3::new(-gx, gy, gz),
                Vec3::new(-gx, -gy, gz),
            ],
            gravity: GRAVITY,
            leg_length_min: 0.05,
            leg_length_max: 0.32,
            stand_height: 0.25,
            uav_arm_length: 0.20,
            tuck_length: 0.08,
            thrust_max: 30.0,
            yaw_torque_coeff: 0.02,
            hover_power: 400.0,
            servo_kp: 400.0,
            servo_kd: 40.0,
            servo_speed_max: 2.0,
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(DynamicsError::InvalidParams("mass must be positive".into()));
        }
        if self.inertia.cholesky().is_none() || (self.inertia - self.inertia.transpose()).norm() > 1e-12 {
            return Err(DynamicsError::InvalidParams("inertia must be symmetric positive definite".into()));
        }
        if !(0.0 < self.leg_length_min && self.leg_length_min < self.leg_length_max) {
            return Err(DynamicsError::InvalidParams("leg length limits".into()));
        }
        if !(self.hover_power > 0.0 && self.thrust_max > 0.0) {
            return Err(DynamicsError::InvalidParams("rotor parameters must be positive".into()));
        }
        Ok(())
    }

    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }

    /// +1 for left legs, −1 for right legs: orients each thrust axis upward
    /// once the legs are rotated out to the aerial configuration.
    pub fn side(&self, leg: usize) -> f64 {
        if self.hips[leg].y >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Rotor spin direction sign for yaw torque (diagonal pairs share it).
    pub fn spin(&self, leg: usize) -> f64 {
        if leg == 0 || leg == 3 {
            1.0
        } else {
            -1.0
        }
    }

    /// Electrical rotor power for total thrust `thrust`, before adding the
    /// mechanical work term.
    pub fn induced_power(&self, thrust: f64) -> f64 {
        self.hover_power * (thrust.max(0.0) / self.weight()).powf(1.5)
    }
}
