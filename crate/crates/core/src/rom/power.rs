//! Actuator power from massless-leg statics.

use crate::geometry::Vec3;
use crate::rom::dynamics::{BodyState, ForceSet};
use crate::rom::kinematics::LegKinematics;
use crate::rom::params::RobotParams;

/// Positive mechanical work rate: `Σ max(0, τ_j q̇_j)`. Servos do not
/// regenerate, so negative work is discarded per joint.
pub fn rectified_power(torques: &[f64], rates: &[f64]) -> f64 {
    torques.iter().zip(rates).map(|(t, w)| (t * w).max(0.0)).sum()
}

/// Joint torques of leg `i` holding the external foot and thruster forces
/// (inertial frame) on a massless chain.
pub fn leg_torques(body: &BodyState, legs: &LegKinematics, forces: &ForceSet, i: usize, params: &RobotParams) -> Vec3 {
    let rt = body.rotation().transpose();
    let leg = &legs.legs[i];
    let foot = leg.jacobian(leg.length, true).transpose() * (rt * forces.foot[i]);
    let thr = leg.jacobian(params.thruster_offset, false).transpose() * (rt * forces.thrust[i]);
    -(foot + thr)
}

/// Total joint power `P_j` over the twelve leg joints, W.
pub fn joint_power(body: &BodyState, legs: &LegKinematics, forces: &ForceSet, params: &RobotParams) -> f64 {
    (0..4)
        .map(|i| {
            let tau = leg_torques(body, legs, forces, i, params);
            rectified_power(tau.as_slice(), legs.legs[i].rates().as_slice())
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rom::kinematics::LegJoint;

    #[test]
    fn single_joint_definition() {
        assert_eq!(rectified_power(&[2.0], &[1.5]), 3.0);
        assert_eq!(rectified_power(&[2.0, -1.0], &[1.5, 2.0]), 3.0);
    }

    #[test]
    fn resting_robot_draws_no_power() {
        let p = RobotParams::default();
        let legs = LegKinematics { legs: [LegJoint::new(0.0, 0.0, 0.25); 4] };
        let mut f = ForceSet::default();
        f.foot = [Vec3::new(0.0, 0.0, p.weight() / 4.0); 4];
        assert_eq!(joint_power(&BodyState::default(), &legs, &f, &p), 0.0);
    }

    #[test]
    fn extending_loaded_leg_does_positive_work() {
        let p = RobotParams::default();
        let mut j = LegJoint::new(0.0, 0.0, 0.2);
        j.length_rate = 0.1;
        let legs = LegKinematics { legs: [j, LegJoint::default(), LegJoint::default(), LegJoint::default()] };
        let mut f = ForceSet::default();
        f.foot[0] = Vec3::new(0.0, 0.0, 20.0);
        let pj = joint_power(&BodyState::default(), &legs, &f, &p);
        assert!((pj - 2.0).abs() < 1e-12);
        // retracting under the same load is negative work, discarded
        let mut legs2 = legs;
        legs2.legs[0].length_rate = -0.1;
        assert_eq!(joint_power(&BodyState::default(), &legs2, &f, &p), 0.0);
    }
}
