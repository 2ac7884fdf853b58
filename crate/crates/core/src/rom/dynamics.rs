//! Single rigid body with four massless legs: `M(q) q̈ + h(q, q̇) = Σ u`.
//!
//! Generalized coordinates are `q_d = [p_b, θ_b]` with Euler-rate
//! velocities. Point forces enter through the transposed velocity
//! Jacobians of their application points.

use nalgebra::{Matrix3, Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::DynamicsError;
use crate::geometry::Vec3;
use crate::rom::kinematics::{euler_rate_map, euler_rate_map_dot, rotation, skew, LegKinematics};
use crate::rom::params::RobotParams;

/// Smallest `|det H| = |cos(pitch)|` accepted before reporting a singular
/// attitude.
pub const SINGULAR_DET: f64 = 1e-6;
pub const MAX_STEP: f64 = 1e-2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BodyState {
    pub position: Vec3,
    /// (roll, pitch, yaw), rad.
    pub euler: Vec3,
    pub velocity: Vec3,
    /// Euler-angle rates, rad/s.
    pub euler_rates: Vec3,
}

impl BodyState {
    pub fn at(position: Vec3) -> Self {
        Self { position, ..Default::default() }
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        rotation(&self.euler)
    }

    /// Body-frame angular velocity.
    pub fn omega_body(&self) -> Vec3 {
        euler_rate_map(&self.euler) * self.euler_rates
    }

    pub fn q(&self) -> Vector6<f64> {
        Vector6::new(
            self.position.x,
            self.position.y,
            self.position.z,
            self.euler.x,
            self.euler.y,
            self.euler.z,
        )
    }

    pub fn qdot(&self) -> Vector6<f64> {
        Vector6::new(
            self.velocity.x,
            self.velocity.y,
            self.velocity.z,
            self.euler_rates.x,
            self.euler_rates.y,
            self.euler_rates.z,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.q().iter().chain(self.qdot().iter()).all(|v| v.is_finite())
    }

    /// Tilt of the body z axis from vertical, rad.
    pub fn tilt(&self) -> f64 {
        (self.rotation() * Vec3::z()).z.clamp(-1.0, 1.0).acos()
    }

    fn check(&self) -> Result<(), DynamicsError> {
        let det = self.euler.y.cos();
        if det.abs() < SINGULAR_DET {
            return Err(DynamicsError::Singular { det, pitch: self.euler.y });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub time: f64,
    pub body: BodyState,
    pub legs: LegKinematics,
}

/// Inertial-frame forces applied to the robot.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ForceSet {
    /// Ground reaction at each foot.
    pub foot: [Vec3; 4],
    /// Thruster force at each thruster mount.
    pub thrust: [Vec3; 4],
    /// Ground reaction at each landing-gear point.
    pub gear: [Vec3; 4],
    /// Pure torque in the body frame (rotor drag).
    pub body_torque: Vec3,
}

/// Body-frame offset of leg `i`'s foot from the COM.
pub fn foot_offset(legs: &LegKinematics, i: usize, params: &RobotParams) -> Vec3 {
    params.hips[i] + legs.legs[i].foot_vector()
}

pub fn thruster_offset(legs: &LegKinematics, i: usize, params: &RobotParams) -> Vec3 {
    params.hips[i] + legs.legs[i].point_along(params.thruster_offset)
}

pub fn foot_position(body: &BodyState, legs: &LegKinematics, i: usize, params: &RobotParams) -> Vec3 {
    body.position + body.rotation() * foot_offset(legs, i, params)
}

/// Thruster position and unit thrust direction (inertial frame).
pub fn thruster_position(body: &BodyState, legs: &LegKinematics, i: usize, params: &RobotParams) -> (Vec3, Vec3) {
    let r = body.rotation();
    let pos = body.position + r * thruster_offset(legs, i, params);
    let dir = r * legs.legs[i].thrust_axis(params.side(i));
    (pos, dir)
}

/// Inertial velocity of a body-fixed offset moving at `rel_vel` (body frame).
pub fn point_velocity(body: &BodyState, offset: &Vec3, rel_vel: &Vec3) -> Vec3 {
    body.velocity + body.rotation() * (body.omega_body().cross(offset) + rel_vel)
}

pub fn foot_velocity(body: &BodyState, legs: &LegKinematics, i: usize, params: &RobotParams) -> Vec3 {
    let leg = &legs.legs[i];
    let rel = leg.jacobian(leg.length, true) * leg.rates();
    point_velocity(body, &foot_offset(legs, i, params), &rel)
}

pub fn mass_matrix(body: &BodyState, params: &RobotParams) -> Result<Matrix6<f64>, DynamicsError> {
    body.check()?;
    let h = euler_rate_map(&body.euler);
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&(Matrix3::identity() * params.mass));
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&(h.transpose() * params.inertia * h));
    Ok(m)
}

/// Gravity and Coriolis/gyroscopic terms.
pub fn bias_forces(body: &BodyState, params: &RobotParams) -> Result<Vector6<f64>, DynamicsError> {
    body.check()?;
    let h = euler_rate_map(&body.euler);
    let hdot = euler_rate_map_dot(&body.euler, &body.euler_rates);
    let w = h * body.euler_rates;
    let iw = params.inertia * w;
    let rot = h.transpose() * (params.inertia * (hdot * body.euler_rates) + w.cross(&iw));
    Ok(Vector6::new(0.0, 0.0, params.mass * params.gravity, rot.x, rot.y, rot.z))
}

/// `Jᵀ f` for an inertial force applied at a body-frame offset.
pub fn point_force_generalized(body: &BodyState, offset: &Vec3, force: &Vec3) -> Vector6<f64> {
    let h = euler_rate_map(&body.euler);
    let f_body = body.rotation().transpose() * force;
    let tq = h.transpose() * offset.cross(&f_body);
    Vector6::new(force.x, force.y, force.z, tq.x, tq.y, tq.z)
}

/// Velocity Jacobian (3×6) of a body-fixed offset w.r.t. `q̇_d`.
pub fn point_jacobian(body: &BodyState, offset: &Vec3) -> nalgebra::Matrix3x6<f64> {
    let mut j = nalgebra::Matrix3x6::zeros();
    j.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());
    let rot = -body.rotation() * skew(offset) * euler_rate_map(&body.euler);
    j.fixed_view_mut::<3, 3>(0, 3).copy_from(&rot);
    j
}

pub fn generalized_forces(
    body: &BodyState,
    legs: &LegKinematics,
    forces: &ForceSet,
    params: &RobotParams,
) -> Vector6<f64> {
    let mut u = Vector6::zeros();
    for i in 0..4 {
        u += point_force_generalized(body, &foot_offset(legs, i, params), &forces.foot[i]);
        u += point_force_generalized(body, &thruster_offset(legs, i, params), &forces.thrust[i]);
        u += point_force_generalized(body, &params.gear[i], &forces.gear[i]);
    }
    let tq = euler_rate_map(&body.euler).transpose() * forces.body_torque;
    let mut rot = u.fixed_rows_mut::<3>(3);
    rot += tq;
    u
}

/// Solve `M q̈ = u − h`.
pub fn accelerations(
    body: &BodyState,
    legs: &LegKinematics,
    forces: &ForceSet,
    params: &RobotParams,
) -> Result<Vector6<f64>, DynamicsError> {
    let m = mass_matrix(body, params)?;
    let rhs = generalized_forces(body, legs, forces, params) - bias_forces(body, params)?;
    let lin = rhs.fixed_rows::<3>(0) / params.mass;
    let m_rot: Matrix3<f64> = m.fixed_view::<3, 3>(3, 3).into_owned();
    let ang = m_rot
        .cholesky()
        .ok_or(DynamicsError::Singular { det: body.euler.y.cos(), pitch: body.euler.y })?
        .solve(&rhs.fixed_rows::<3>(3).into_owned());
    Ok(Vector6::new(lin.x, lin.y, lin.z, ang.x, ang.y, ang.z))
}

pub fn kinetic_energy(body: &BodyState, params: &RobotParams) -> f64 {
    let w = body.omega_body();
    0.5 * params.mass * body.velocity.norm_squared() + 0.5 * w.dot(&(params.inertia * w))
}

fn advance(body: &BodyState, qdot: &Vector6<f64>, qddot: &Vector6<f64>, h: f64) -> BodyState {
    BodyState {
        position: body.position + qdot.fixed_rows::<3>(0) * h,
        euler: body.euler + qdot.fixed_rows::<3>(3) * h,
        velocity: body.velocity + qddot.fixed_rows::<3>(0) * h,
        euler_rates: body.euler_rates + qddot.fixed_rows::<3>(3) * h,
    }
}

/// One RK4 step where forces are re-evaluated at every stage. Leg joints
/// move at their commanded rates across the step.
pub fn step_with<F>(
    state: &RobotState,
    dt: f64,
    params: &RobotParams,
    mut forces: F,
) -> Result<RobotState, DynamicsError>
where
    F: FnMut(&BodyState, &LegKinematics) -> ForceSet,
{
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(DynamicsError::InvalidStep(dt));
    }
    let mut deriv = |b: &BodyState, tau: f64| -> Result<(Vector6<f64>, Vector6<f64>), DynamicsError> {
        let legs = state.legs.extrapolate(tau);
        let f = forces(b, &legs);
        Ok((b.qdot(), accelerations(b, &legs, &f, params)?))
    };
    let b0 = state.body;
    let (k1v, k1a) = deriv(&b0, 0.0)?;
    let b1 = advance(&b0, &k1v, &k1a, 0.5 * dt);
    let (k2v, k2a) = deriv(&b1, 0.5 * dt)?;
    let b2 = advance(&b0, &k2v, &k2a, 0.5 * dt);
    let (k3v, k3a) = deriv(&b2, 0.5 * dt)?;
    let b3 = advance(&b0, &k3v, &k3a, dt);
    let (k4v, k4a) = deriv(&b3, dt)?;
    let v = (k1v + k2v * 2.0 + k3v * 2.0 + k4v) / 6.0;
    let a = (k1a + k2a * 2.0 + k3a * 2.0 + k4a) / 6.0;
    let body = advance(&b0, &v, &a, dt);
    let next = RobotState { time: state.time + dt, body, legs: state.legs.extrapolate(dt) };
    if !next.body.is_finite() {
        return Err(DynamicsError::Diverged { time: next.time });
    }
    Ok(next)
}

/// One RK4 step with forces held constant over the step.
pub fn step(state: &RobotState, forces: &ForceSet, dt: f64, params: &RobotParams) -> Result<RobotState, DynamicsError> {
    step_with(state, dt, params, |_, _| *forces)
}
