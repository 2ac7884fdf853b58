//! Fixtures shared by the benchmarks.

use mmloco_core::planner::{CostModel, EdgeCosts, PrmConfig, RoadmapGraph};
use mmloco_core::rom::{LegJoint, LegKinematics, RobotParams, RobotState};
use mmloco_core::{Scenario, Vec3};

pub fn scene() -> Scenario {
    Scenario::bundled("env_b").expect("bundled scenario")
}

pub fn roadmap(seed: u64) -> (Scenario, RoadmapGraph, EdgeCosts) {
    let s = scene();
    let g = RoadmapGraph::build_mm_prm(&s.env, &PrmConfig { seed, ..PrmConfig::default() }).expect("roadmap builds");
    let c = EdgeCosts::from_model(&g, &CostModel::nominal());
    (s, g, c)
}

/// Body hovering in the aerial leg pose.
pub fn hover_state(params: &RobotParams) -> RobotState {
    let arm = std::f64::consts::FRAC_PI_2;
    let legs = LegKinematics { legs: [0, 1, 2, 3].map(|i| LegJoint::new(arm * params.side(i), 0.0, params.uav_arm_length)) };
    RobotState { body: mmloco_core::rom::BodyState::at(Vec3::new(0.0, 0.0, 2.0)), legs, ..Default::default() }
}
