//! Morphing between the standing and the aerial configuration.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::rom::{LegJoint, LegKinematics, RobotParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformDirection {
    ToAir,
    ToGround,
}

/// `3τ² − 2τ³` and its derivative in `τ`.
fn smoothstep(tau: f64) -> (f64, f64) {
    let t = tau.clamp(0.0, 1.0);
    (t * t * (3.0 - 2.0 * t), 6.0 * t * (1.0 - t))
}

/// Joint state of leg `i` at time `t` into a ToAir sequence of length
/// `duration`: crouch to the tuck length, rotate the hips out to the side,
/// extend to the arm length.
fn to_air(i: usize, t: f64, duration: f64, robot: &RobotParams) -> LegJoint {
    let phase = duration / 3.0;
    let side = robot.side(i);
    let (l0, l1, l2) = (robot.stand_height, robot.tuck_length, robot.uav_arm_length);
    let k = ((t / phase).floor() as i64).clamp(0, 2);
    let (s, ds) = smoothstep((t - k as f64 * phase) / phase);
    let ds = if (0.0..duration).contains(&t) { ds / phase } else { 0.0 };
    let mut j = LegJoint::default();
    match k {
        0 => {
            j.length = l0 + (l1 - l0) * s;
            j.length_rate = (l1 - l0) * ds;
        }
        1 => {
            j.length = l1;
            j.frontal = side * FRAC_PI_2 * s;
            j.frontal_rate = side * FRAC_PI_2 * ds;
        }
        _ => {
            j.frontal = side * FRAC_PI_2;
            j.length = l1 + (l2 - l1) * s;
            j.length_rate = (l2 - l1) * ds;
        }
    }
    j
}

/// Timed joint trajectory; ToGround replays ToAir backwards.
pub fn transform_sequence(direction: TransformDirection, t: f64, duration: f64, robot: &RobotParams) -> LegKinematics {
    LegKinematics {
        legs: std::array::from_fn(|i| match direction {
            TransformDirection::ToAir => to_air(i, t, duration, robot),
            TransformDirection::ToGround => {
                let mut j = to_air(i, duration - t, duration, robot);
                j.frontal_rate = -j.frontal_rate;
                j.sagittal_rate = -j.sagittal_rate;
                j.length_rate = -j.length_rate;
                j
            }
        }),
    }
}

pub fn standing_legs(robot: &RobotParams) -> LegKinematics {
    LegKinematics { legs: [LegJoint::new(0.0, 0.0, robot.stand_height); 4] }
}

pub fn aerial_legs(robot: &RobotParams) -> LegKinematics {
    LegKinematics { legs: std::array::from_fn(|i| LegJoint::new(robot.side(i) * FRAC_PI_2, 0.0, robot.uav_arm_length)) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_the_two_configurations() {
        let r = RobotParams::default();
        let d = 4.0;
        let a0 = transform_sequence(TransformDirection::ToAir, 0.0, d, &r);
        let a1 = transform_sequence(TransformDirection::ToAir, d, d, &r);
        let g1 = transform_sequence(TransformDirection::ToGround, d, d, &r);
        for i in 0..4 {
            assert!((a0.legs[i].angles() - standing_legs(&r).legs[i].angles()).norm() < 1e-12);
            assert!((a1.legs[i].angles() - aerial_legs(&r).legs[i].angles()).norm() < 1e-12);
            assert!((g1.legs[i].angles() - a0.legs[i].angles()).norm() < 1e-3);
        }
    }

    #[test]
    fn rates_match_finite_differences() {
        let r = RobotParams::default();
        for dir in [TransformDirection::ToAir, TransformDirection::ToGround] {
            for t in [0.3, 1.0, 2.0, 2.9, 3.5] {
                let h = 1e-6;
                let p = transform_sequence(dir, t + h, 4.0, &r);
                let m = transform_sequence(dir, t - h, 4.0, &r);
                let c = transform_sequence(dir, t, 4.0, &r);
                for i in 0..4 {
                    let fd = (p.legs[i].angles() - m.legs[i].angles()) / (2.0 * h);
                    assert!((fd - c.legs[i].rates()).norm() < 1e-5, "{dir:?} t={t}");
                }
            }
        }
    }
}
