use mmloco_core::planner::{
    plan_mission, CostModel, Discretization, EdgeKind, MissionPlan, ModeTag, PlanSegment, PrmConfig, Waypoint,
};
use mmloco_core::rom::{GroundModel, RobotParams};
use mmloco_core::sim::calibrate::{flat_ground, transform_energies, walk_rollout};
use mmloco_core::sim::*;
use mmloco_core::{Box3, EnvironmentMap, SimError, Vec3};

fn defaults() -> (RobotParams, GroundModel, SimParams) {
    (RobotParams::default(), GroundModel::default(), SimParams::default())
}

fn walk_plan(points: &[Vec3]) -> MissionPlan {
    let waypoints: Vec<Waypoint> = points.iter().map(|&pos| Waypoint { pos, mode: ModeTag::Walking }).collect();
    let segments: Vec<PlanSegment> =
        points.windows(2).map(|w| PlanSegment { kind: EdgeKind::Walk, energy: 50.0 * (w[1] - w[0]).norm() }).collect();
    let total_energy = segments.iter().map(|s| s.energy).sum();
    MissionPlan { waypoints, segments, total_energy, n_transitions: 0 }
}

/// Ground start, goal on a raised walkable block two metres away.
fn step_up_env() -> EnvironmentMap {
    let bounds = Box3::new(Vec3::zeros(), Vec3::new(8.0, 6.0, 5.0));
    EnvironmentMap::new(bounds, 0.0, vec![Box3::walkable(Vec3::new(4.0, 1.5, 0.0), Vec3::new(7.0, 4.5, 1.5))]).unwrap()
}

#[test]
fn five_metre_walk_arrives() {
    let (r, g, s) = defaults();
    let env = flat_ground(10.0);
    let mut run = Runner::standing(&env, &r, &g, s, &Vec3::zeros(), 0.0, 1);
    let target = body_target(&Vec3::new(5.0, 0.0, 0.0), &r);
    run.walk_to(&target).unwrap();
    run.stop_walking().unwrap();
    assert!((target - run.state.body.position).xy().norm() < 0.15 + 0.05);
    assert!(run.state.body.tilt() < 0.2);
    assert!(run.min_stance_h_w.is_finite());
}

#[test]
fn single_waypoint_plan_is_immediate() {
    let (r, g, s) = defaults();
    let env = flat_ground(5.0);
    let plan = walk_plan(&[Vec3::new(1.0, 1.0, 0.0)]);
    let log = run_mission(&plan, &env, &r, &g, &s).unwrap();
    assert!(log.result.is_success());
    assert!(log.realized_total() < 1e-9);
    assert_eq!(log.n_transformations, 0);
}

#[test]
fn waypoint_inside_obstacle_fails_before_moving() {
    let (r, g, s) = defaults();
    let env = step_up_env();
    let plan = walk_plan(&[Vec3::new(1.0, 3.0, 0.0), Vec3::new(5.0, 3.0, 0.5)]);
    let err = run_mission(&plan, &env, &r, &g, &s).unwrap_err();
    assert!(matches!(err, SimError::MissionFailure { waypoint: 1, .. }), "{err}");
    let mut bad = walk_plan(&[Vec3::new(1.0, 3.0, 0.0), Vec3::new(2.0, 3.0, 0.0)]);
    bad.segments.clear();
    assert!(matches!(run_mission(&bad, &env, &r, &g, &s), Err(SimError::InvalidPlan(_))));
}

#[test]
fn blocked_walk_reports_the_failing_waypoint() {
    let (r, g, s) = defaults();
    let bounds = Box3::new(Vec3::zeros(), Vec3::new(8.0, 6.0, 3.0));
    let env = EnvironmentMap::new(bounds, 0.0, vec![Box3::new(Vec3::new(3.0, 0.0, 0.0), Vec3::new(3.5, 6.0, 2.0))]).unwrap();
    let plan = walk_plan(&[Vec3::new(1.0, 3.0, 0.0), Vec3::new(2.0, 3.0, 0.0), Vec3::new(5.0, 3.0, 0.0)]);
    let log = run_mission(&plan, &env, &r, &g, &s).unwrap();
    match log.result {
        MissionResult::Failed { waypoint, .. } => assert_eq!(waypoint, 2),
        other => panic!("expected a failure, got {other:?}"),
    }
    assert!(log.arrivals[1].is_some() && log.arrivals[2].is_none());
}

#[test]
fn aerial_track_passes_every_vertex() {
    let (r, g, s) = defaults();
    let env = flat_ground(10.0);
    let start = Vec3::new(0.0, 0.0, 2.0);
    let mut run = Runner::hovering(&env, &r, &g, s, &start, 0.0, 3);
    let p0 = run.state.body.position;
    let pts = vec![p0, p0 + Vec3::new(3.0, 0.0, 0.0), p0 + Vec3::new(3.0, 3.0, 1.0), p0 + Vec3::new(0.0, 3.0, 0.5)];
    let traj = PolylineTrajectory::new(pts.clone(), s.flight.speed, s.flight.accel, 0.0);
    let closest = run.fly(&traj, &[0, 1, 2]).unwrap();
    assert!(closest.iter().all(|&c| c < 0.3), "{closest:?}");
    run.hover(1.0).unwrap();
    assert!((run.state.body.position - pts[3]).norm() < 0.3);
}

#[test]
fn stance_governor_keeps_pyramid() {
    let (r, g, s) = defaults();
    let shift = LateralShift::default();
    let governed = run_stance_shift(&r, &g, &s, &shift, true).unwrap();
    let raw = run_stance_shift(&r, &g, &s, &shift, false).unwrap();
    assert_eq!(governed.abort, None);
    assert!(governed.min_h_w >= -1e-3, "{}", governed.min_h_w);
    assert!(raw.min_h_w < -1.0, "{}", raw.min_h_w);
}

#[test]
fn walking_rate_matches_long_rollout() {
    let (r, g, s) = defaults();
    let (model, cal) = calibrate(&r, &g, &s, &CostModel::nominal(), 8.0).unwrap();
    let (energy, _) = walk_rollout(&r, &g, &s, 20.0).unwrap();
    let ratio = energy / 20.0 / model.c_walk_per_m;
    assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio}");
    let (up, down) = transform_energies(&r, &g, &s).unwrap();
    assert_eq!(model.c_t, 0.5 * (up + down));
    assert_eq!((cal.to_air_energy, cal.to_ground_energy), (up, down));
}

fn step_up_mission() -> (MissionPlan, MissionLog) {
    let (r, g, s) = defaults();
    let env = step_up_env();
    let d = Discretization::Prm(PrmConfig { radius: 2.5, n_walk: 120, n_fly: 120, seed: 11 });
    let out = plan_mission(&env, Vec3::new(1.0, 3.0, 0.0), Vec3::new(5.5, 3.0, 1.5), &d, &CostModel::nominal(), None).unwrap();
    let log = run_mission(&out.plan, &env, &r, &g, &s).unwrap();
    (out.plan, log)
}

#[test]
fn step_up_mission_keeps_log_invariants() {
    let (plan, log) = step_up_mission();
    assert!(log.result.is_success(), "{:?}", log.result);
    assert_eq!(log.n_transformations, plan.n_transitions);
    assert!(log.final_error < 0.3);
    assert!(log.arrivals.iter().all(Option::is_some));

    let mut mode = log.mode_timeline[0].1;
    for &(_, m) in &log.mode_timeline[1..] {
        assert_eq!(m, mode.next());
        mode = m;
    }
    assert!(log.segments.iter().all(|s| s.realized_j >= 0.0));

    let mut csv = Vec::new();
    write_trajectory_csv(&log.rows, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (ti, ji, fi) = (col("t"), col("P_j"), col("P_f"));
    let parsed: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[ti].parse().unwrap(), f[ji].parse::<f64>().unwrap() + f[fi].parse::<f64>().unwrap())
        })
        .collect();
    let mut energy = 0.0;
    for w in parsed.windows(2) {
        energy += (w[1].0 - w[0].0) * w[1].1;
    }
    let total = log.realized_total();
    assert!((energy - total).abs() <= 1e-3 * total, "{energy} vs {total}");
}

#[test]
fn missions_are_deterministic() {
    let (_, a) = step_up_mission();
    let (_, b) = step_up_mission();
    assert_eq!(a, b);
}
