//! Rollouts that set the walking rate and the transformation cost.

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::geometry::{Box3, EnvironmentMap, Vec3};
use crate::planner::CostModel;
use crate::rom::{GroundModel, RobotParams};

use super::mission::{body_target, Abort, Runner, SimParams};
use super::transform::TransformDirection;

/// Distance walked before the steady-state window opens, m.
const WARMUP: f64 = 1.0;

/// Outcome of the calibration rollouts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c_walk_per_m: f64,
    #[serde(rename = "C_t")]
    pub c_t: f64,
    /// Length of the steady trot window, m.
    pub walk_distance: f64,
    pub walk_energy: f64,
    pub walk_duration: f64,
    pub to_air_energy: f64,
    pub to_ground_energy: f64,
}

/// Obstacle-free ground plane around the origin.
pub fn flat_ground(extent: f64) -> EnvironmentMap {
    let bounds = Box3::new(Vec3::new(-extent, -extent, 0.0), Vec3::new(extent, extent, 10.0));
    EnvironmentMap::new(bounds, 0.0, vec![]).expect("flat ground is valid")
}

fn fail(waypoint: usize) -> impl Fn(Abort) -> SimError {
    move |Abort(reason)| SimError::MissionFailure { waypoint, reason }
}

/// Energy and duration of a governed walk of `distance` along +x, from
/// standing to standing.
pub fn walk_rollout(robot: &RobotParams, ground: &GroundModel, sim: &SimParams, distance: f64) -> Result<(f64, f64), SimError> {
    let env = flat_ground(distance + 5.0);
    let timeout = sim.waypoint_timeout.max(4.0 * distance / sim.gait.speed());
    let params = SimParams { waypoint_timeout: timeout, ..*sim };
    let mut run = Runner::standing(&env, robot, ground, params, &Vec3::zeros(), 0.0, 1);
    run.record = false;
    run.walk_to(&body_target(&Vec3::new(distance, 0.0, 0.0), robot)).map_err(fail(1))?;
    run.stop_walking().map_err(fail(1))?;
    Ok((run.segment_energy[0], run.time()))
}

/// Walking energy per metre over a steady window of `window` metres.
pub fn walk_rate(robot: &RobotParams, ground: &GroundModel, sim: &SimParams, window: f64) -> Result<(f64, f64, f64), SimError> {
    let end = WARMUP + window;
    let env = flat_ground(end + 5.0);
    let mut run = Runner::standing(&env, robot, ground, *sim, &Vec3::zeros(), 0.0, 1);
    run.record = false;
    let target = body_target(&Vec3::new(end + 2.0, 0.0, 0.0), robot);
    let mut mark: Option<(f64, f64, Vec3)> = None;
    loop {
        run.walk_tick(Some(&target)).map_err(fail(1))?;
        if run.time() > sim.waypoint_timeout * (1.0 + end / 5.0) {
            return Err(SimError::MissionFailure { waypoint: 1, reason: "calibration walk timed out".into() });
        }
        let p = run.state.body.position;
        match mark {
            None if p.x >= WARMUP => mark = Some((run.segment_energy[0], run.time(), p)),
            Some((e0, t0, p0)) if p.x >= end => {
                let d = (p - p0).xy().norm();
                return Ok(((run.segment_energy[0] - e0) / d, d, run.time() - t0));
            }
            _ => {}
        }
    }
}

/// Integrated power of the ToAir and ToGround sequences, robot resting on
/// flat ground.
pub fn transform_energies(robot: &RobotParams, ground: &GroundModel, sim: &SimParams) -> Result<(f64, f64), SimError> {
    let env = flat_ground(5.0);
    let mut run = Runner::standing(&env, robot, ground, *sim, &Vec3::zeros(), 0.0, 1);
    run.record = false;
    run.transform(TransformDirection::ToAir).map_err(fail(0))?;
    let up = run.segment_energy[0];
    run.transform(TransformDirection::ToGround).map_err(fail(0))?;
    Ok((up, run.segment_energy[0] - up))
}

/// Calibrate `c_walk_per_m` and `C_t` of `base` with the simulator.
pub fn calibrate(
    robot: &RobotParams,
    ground: &GroundModel,
    sim: &SimParams,
    base: &CostModel,
    window: f64,
) -> Result<(CostModel, Calibration), SimError> {
    let (rate, walk_distance, walk_duration) = walk_rate(robot, ground, sim, window)?;
    let (to_air_energy, to_ground_energy) = transform_energies(robot, ground, sim)?;
    let c_t = 0.5 * (to_air_energy + to_ground_energy);
    let model = CostModel { c_walk_per_m: rate, c_t, mass: robot.mass, gravity: robot.gravity, ..*base };
    model.validate().map_err(|e| SimError::InvalidPlan(e.to_string()))?;
    let cal = Calibration {
        c_walk_per_m: rate,
        c_t,
        walk_distance,
        walk_energy: rate * walk_distance,
        walk_duration,
        to_air_energy,
        to_ground_energy,
    };
    Ok((model, cal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibrated_values_are_positive() {
        let (r, g, s) = (RobotParams::default(), GroundModel::default(), SimParams::default());
        let (m, c) = calibrate(&r, &g, &s, &CostModel::nominal(), 4.0).unwrap();
        assert!(m.c_walk_per_m > 0.0 && m.c_t > 0.0);
        assert!((c.walk_distance - 4.0).abs() < 0.1);
        assert_eq!(m.p_f, 400.0);
    }

    #[test]
    fn heavier_robot_costs_more_to_transform() {
        let (g, s) = (GroundModel::default(), SimParams::default());
        let light = RobotParams::default();
        let heavy = RobotParams { mass: 2.0 * light.mass, ..light.clone() };
        let (a0, g0) = transform_energies(&light, &g, &s).unwrap();
        let (a1, g1) = transform_energies(&heavy, &g, &s).unwrap();
        assert!(a1 + g1 > a0 + g0);
    }
}
