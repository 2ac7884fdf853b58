//! One simulation tick: contact and rotor forces, RK4 step, power meters.

use crate::error::DynamicsError;
use crate::geometry::{EnvironmentMap, Vec3};
use crate::rom::dynamics::thruster_offset;
use crate::rom::{
    foot_position, foot_velocity, ground_reaction, joint_power, point_velocity, step_with, BodyState,
    ForceSet, GroundModel, LegKinematics, RobotParams, RobotState,
};

/// Penetration allowed when choosing the surface under a contact point, m.
pub const CONTACT_TOL: f64 = 0.02;

/// Ground reactions on the four feet and the four landing-gear points.
pub fn contact_forces(
    env: &EnvironmentMap,
    ground: &GroundModel,
    robot: &RobotParams,
    body: &BodyState,
    legs: &LegKinematics,
) -> ([Vec3; 4], [Vec3; 4]) {
    let r = body.rotation();
    let mut feet = [Vec3::zeros(); 4];
    let mut gear = [Vec3::zeros(); 4];
    for i in 0..4 {
        let p = foot_position(body, legs, i, robot);
        let v = foot_velocity(body, legs, i, robot);
        feet[i] = ground_reaction(&p, &v, ground, env.contact_surface(&p, CONTACT_TOL));
        let pg = body.position + r * robot.gear[i];
        let vg = point_velocity(body, &robot.gear[i], &Vec3::zeros());
        gear[i] = ground_reaction(&pg, &vg, ground, env.contact_surface(&pg, CONTACT_TOL));
    }
    (feet, gear)
}

/// Rotor forces (inertial) and the reaction yaw torque (body frame).
pub fn rotor_forces(robot: &RobotParams, body: &BodyState, legs: &LegKinematics, thrust: &[f64; 4]) -> ([Vec3; 4], Vec3) {
    let r = body.rotation();
    let mut f = [Vec3::zeros(); 4];
    let mut yaw = 0.0;
    for i in 0..4 {
        f[i] = r * legs.legs[i].thrust_axis(robot.side(i)) * thrust[i];
        yaw += robot.spin(i) * robot.yaw_torque_coeff * thrust[i];
    }
    (f, Vec3::new(0.0, 0.0, yaw))
}

pub fn force_set(
    env: &EnvironmentMap,
    ground: &GroundModel,
    robot: &RobotParams,
    body: &BodyState,
    legs: &LegKinematics,
    thrust: &[f64; 4],
) -> ForceSet {
    let (foot, gear) = contact_forces(env, ground, robot, body, legs);
    let (thrust, body_torque) = rotor_forces(robot, body, legs, thrust);
    ForceSet { foot, thrust, gear, body_torque }
}

/// Electrical rotor power: induced power plus the work rate of the thrust
/// on the body, never negative.
pub fn rotor_power(robot: &RobotParams, forces: &ForceSet, velocity: &Vec3) -> f64 {
    let total: Vec3 = forces.thrust.iter().sum();
    let magnitude: f64 = forces.thrust.iter().map(|f| f.norm()).sum();
    (robot.induced_power(magnitude) + total.dot(velocity)).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TickOutput {
    pub state: RobotState,
    /// Forces at the start of the tick.
    pub forces: ForceSet,
    pub joint_power: f64,
    pub rotor_power: f64,
}

/// Advance one tick with the legs moving at their current joint rates.
pub fn tick(
    env: &EnvironmentMap,
    ground: &GroundModel,
    robot: &RobotParams,
    state: &RobotState,
    thrust: &[f64; 4],
    dt: f64,
) -> Result<TickOutput, DynamicsError> {
    let forces = force_set(env, ground, robot, &state.body, &state.legs, thrust);
    let next = step_with(state, dt, robot, |b, l| force_set(env, ground, robot, b, l, thrust))?;
    Ok(TickOutput {
        state: next,
        forces,
        joint_power: joint_power(&state.body, &state.legs, &forces, robot),
        rotor_power: rotor_power(robot, &forces, &state.body.velocity),
    })
}

/// Body-frame thruster positions, used by the mixer.
pub fn thruster_layout(robot: &RobotParams, legs: &LegKinematics) -> [Vec3; 4] {
    std::array::from_fn(|i| thruster_offset(legs, i, robot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Box3;
    use crate::rom::LegJoint;

    fn flat() -> EnvironmentMap {
        EnvironmentMap::new(Box3::new(Vec3::new(-5.0, -5.0, 0.0), Vec3::new(5.0, 5.0, 5.0)), 0.0, vec![]).unwrap()
    }

    #[test]
    fn standing_robot_settles_at_static_penetration() {
        let env = flat();
        let (g, r) = (GroundModel::default(), RobotParams::default());
        let legs = LegKinematics { legs: [LegJoint::new(0.0, 0.0, r.stand_height); 4] };
        let mut s = RobotState { time: 0.0, body: BodyState::at(Vec3::new(0.0, 0.0, r.stand_height)), legs };
        for _ in 0..3000 {
            s = tick(&env, &g, &r, &s, &[0.0; 4], 1e-3).unwrap().state;
        }
        let delta = r.weight() / (4.0 * g.k_gp);
        assert!((s.body.position.z - (r.stand_height - delta)).abs() < 0.01 * delta);
    }

    #[test]
    fn hover_thrust_costs_hover_power() {
        let r = RobotParams::default();
        let legs = LegKinematics {
            legs: std::array::from_fn(|i| LegJoint::new(r.side(i) * std::f64::consts::FRAC_PI_2, 0.0, r.uav_arm_length)),
        };
        let body = BodyState::at(Vec3::new(0.0, 0.0, 2.0));
        let t = r.weight() / 4.0;
        let (f, yaw) = rotor_forces(&r, &body, &legs, &[t; 4]);
        let total: Vec3 = f.iter().sum();
        assert!((total - Vec3::new(0.0, 0.0, r.weight())).norm() < 1e-12);
        assert!(yaw.norm() < 1e-15);
        let fs = ForceSet { foot: [Vec3::zeros(); 4], thrust: f, gear: [Vec3::zeros(); 4], body_torque: yaw };
        assert!((rotor_power(&r, &fs, &Vec3::zeros()) - r.hover_power).abs() < 1e-9);
        // climbing at 1 m/s adds m·g watts
        assert!((rotor_power(&r, &fs, &Vec3::z()) - r.hover_power - r.weight()).abs() < 1e-9);
    }
}
