//! Mission state machine: walk, transform, fly, transform back.

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::geometry::{EnvironmentMap, Vec3};
use crate::governor::GovernorGains;
use crate::planner::{EdgeKind, MissionPlan, ModeTag};
use crate::rom::kinematics::rot_z;
use crate::rom::{BodyState, GroundModel, LegKinematics, RobotParams, RobotState};

use super::flight::{flight_tracker, FlightParams, FlightReference, PolylineTrajectory};
use super::gait::{
    friction_context, step_command, FootServo, GaitParams, GovernedReference, StepCommand, TrotGait,
};
use super::physics::{tick, CONTACT_TOL};
use super::transform::{aerial_legs, standing_legs, transform_sequence, TransformDirection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocoMode {
    Walking,
    Flying,
    TransformToAir,
    TransformToGround,
}

impl LocoMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            LocoMode::Walking => "Walking",
            LocoMode::Flying => "Flying",
            LocoMode::TransformToAir => "TransformToAir",
            LocoMode::TransformToGround => "TransformToGround",
        }
    }

    /// Allowed successor in the walk → morph → fly → morph cycle.
    pub fn next(&self) -> LocoMode {
        match self {
            LocoMode::Walking => LocoMode::TransformToAir,
            LocoMode::TransformToAir => LocoMode::Flying,
            LocoMode::Flying => LocoMode::TransformToGround,
            LocoMode::TransformToGround => LocoMode::Walking,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub dt: f64,
    pub log_interval: f64,
    pub transform_duration: f64,
    pub gait: GaitParams,
    pub flight: FlightParams,
    pub arrival_walk: f64,
    pub arrival_fly: f64,
    pub waypoint_timeout: f64,
    /// Largest tilt tolerated during a transformation, degrees.
    pub transform_tilt_max_deg: f64,
    /// Tilt regarded as a fall, degrees.
    pub fall_tilt_deg: f64,
    /// Body height above the surface when resting on the landing gear, m.
    pub gear_height: f64,
    /// Hover clearance above gear contact before the thrust ramp, m.
    pub landing_clearance: f64,
    pub thrust_ramp: f64,
    /// Four-foot stance hold before a transformation, s.
    pub settle_time: f64,
    pub governor: GovernorGains,
    pub governor_enabled: bool,
    /// Pyramid tightening used by the governor, N.
    pub governor_margin: f64,
    /// Horizontal body radius for the collision monitor, m.
    pub collision_radius: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            log_interval: 0.01,
            transform_duration: 4.0,
            gait: GaitParams::default(),
            flight: FlightParams::default(),
            arrival_walk: 0.15,
            arrival_fly: 0.3,
            waypoint_timeout: 60.0,
            transform_tilt_max_deg: 15.0,
            fall_tilt_deg: 45.0,
            gear_height: 0.12,
            landing_clearance: 0.05,
            thrust_ramp: 0.3,
            settle_time: 0.3,
            governor: GovernorGains::default(),
            governor_enabled: true,
            governor_margin: 0.5,
            collision_radius: 0.2,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let ok = self.dt > 0.0
            && self.dt <= crate::rom::dynamics::MAX_STEP
            && self.log_interval >= self.dt
            && self.transform_duration > 0.0
            && self.flight.speed > 0.0
            && self.flight.accel > 0.0
            && self.waypoint_timeout > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidPlan(format!("invalid simulation parameters {self:?}")))
        }
    }
}

/// One trajectory log row; powers are averages over the row's interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub t: f64,
    pub position: Vec3,
    pub euler: Vec3,
    pub velocity: Vec3,
    pub omega: Vec3,
    pub q: [f64; 12],
    pub p_j: f64,
    pub p_f: f64,
    pub mode: LocoMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GovernorTraceRow {
    pub t: f64,
    pub v: f64,
    pub min_h_w: f64,
    pub min_h_r: f64,
    pub n_violated: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentLedger {
    pub kind: EdgeKind,
    #[serde(rename = "planned_J")]
    pub planned_j: f64,
    #[serde(rename = "realized_J")]
    pub realized_j: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum MissionResult {
    Completed,
    Failed { waypoint: usize, reason: String },
}

impl MissionResult {
    pub fn is_success(&self) -> bool {
        matches!(self, MissionResult::Completed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MissionLog {
    pub rows: Vec<LogRow>,
    pub governor_trace: Vec<GovernorTraceRow>,
    pub segments: Vec<SegmentLedger>,
    pub mode_timeline: Vec<(f64, LocoMode)>,
    /// Arrival time per waypoint; the first is the start.
    pub arrivals: Vec<Option<f64>>,
    pub result: MissionResult,
    pub n_transformations: usize,
    /// Lowest governor constraint value over walking ticks, N.
    pub min_stance_h_w: f64,
    pub final_position: Vec3,
    pub final_error: f64,
    pub joint_energy: f64,
    pub rotor_energy: f64,
    pub duration: f64,
}

impl MissionLog {
    pub fn realized_total(&self) -> f64 {
        self.segments.iter().map(|s| s.realized_j).sum()
    }

    pub fn planned_total(&self) -> f64 {
        self.segments.iter().map(|s| s.planned_j).sum()
    }
}

/// Robot-specific body target for a roadmap node.
pub fn body_target(node: &Vec3, robot: &RobotParams) -> Vec3 {
    node + Vec3::new(0.0, 0.0, robot.stand_height)
}

/// Distance from the end of a flight trajectory at which tracking hands
/// over to the landing ramp, m.
const LANDING_CAPTURE: f64 = 0.15;

/// Body speed below which the landing ramp may start, m/s.
const LANDING_SPEED: f64 = 0.25;

/// Reason a run stopped early.
#[derive(Clone, Debug, PartialEq)]
pub struct Abort(pub String);

impl From<crate::error::DynamicsError> for Abort {
    fn from(e: crate::error::DynamicsError) -> Self {
        Abort(format!("dynamics: {e}"))
    }
}

impl From<SimError> for Abort {
    fn from(e: SimError) -> Self {
        Abort(e.to_string())
    }
}

/// Simulation driver shared by missions and calibration rollouts.
pub struct Runner<'a> {
    pub env: &'a EnvironmentMap,
    pub robot: &'a RobotParams,
    pub ground: &'a GroundModel,
    pub params: SimParams,
    pub state: RobotState,
    pub mode: LocoMode,
    servo: FootServo,
    governor: GovernedReference,
    gait: Option<TrotGait>,
    /// Reference applied on the previous tick.
    prev_ref: Option<[Vec3; 4]>,
    /// Segment receiving energy.
    pub segment: usize,
    pub segment_energy: Vec<f64>,
    pub joint_energy: f64,
    pub rotor_energy: f64,
    pub rows: Vec<LogRow>,
    pub governor_trace: Vec<GovernorTraceRow>,
    pub mode_timeline: Vec<(f64, LocoMode)>,
    pub min_stance_h_w: f64,
    pub record: bool,
    acc_pj: f64,
    acc_pf: f64,
    acc_t: f64,
    last_trace: Option<GovernorTraceRow>,
    ticks: u64,
    log_every: u64,
}

impl<'a> Runner<'a> {
    /// Robot standing at rest on `node` (a walking roadmap node).
    pub fn standing(
        env: &'a EnvironmentMap,
        robot: &'a RobotParams,
        ground: &'a GroundModel,
        params: SimParams,
        node: &Vec3,
        yaw: f64,
        n_segments: usize,
    ) -> Self {
        let sink = robot.weight() / (4.0 * ground.k_gp);
        let mut body = BodyState::at(body_target(node, robot) - Vec3::new(0.0, 0.0, sink));
        body.euler.z = yaw;
        let legs = standing_legs(robot);
        Self::with_state(env, robot, ground, params, RobotState { time: 0.0, body, legs }, LocoMode::Walking, n_segments)
    }

    /// Robot hovering at `node` in the aerial configuration.
    pub fn hovering(
        env: &'a EnvironmentMap,
        robot: &'a RobotParams,
        ground: &'a GroundModel,
        params: SimParams,
        node: &Vec3,
        yaw: f64,
        n_segments: usize,
    ) -> Self {
        let mut body = BodyState::at(body_target(node, robot));
        body.euler.z = yaw;
        let state = RobotState { time: 0.0, body, legs: aerial_legs(robot) };
        Self::with_state(env, robot, ground, params, state, LocoMode::Flying, n_segments)
    }

    fn with_state(
        env: &'a EnvironmentMap,
        robot: &'a RobotParams,
        ground: &'a GroundModel,
        params: SimParams,
        state: RobotState,
        mode: LocoMode,
        n_segments: usize,
    ) -> Self {
        let servo = FootServo::from_legs(&state.legs, robot);
        let governor = GovernedReference::new(&servo.q, params.governor, params.governor_enabled, params.governor_margin);
        let log_every = ((params.log_interval / params.dt).round() as u64).max(1);
        let mut r = Self {
            env,
            robot,
            ground,
            params,
            state,
            mode,
            servo,
            governor,
            gait: None,
            prev_ref: None,
            segment: 0,
            segment_energy: vec![0.0; n_segments.max(1)],
            joint_energy: 0.0,
            rotor_energy: 0.0,
            rows: Vec::new(),
            governor_trace: Vec::new(),
            mode_timeline: vec![(0.0, mode)],
            min_stance_h_w: f64::INFINITY,
            record: true,
            acc_pj: 0.0,
            acc_pf: 0.0,
            acc_t: 0.0,
            last_trace: None,
            ticks: 0,
            log_every,
        };
        r.push_row(0.0, 0.0);
        r
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    fn push_row(&mut self, p_j: f64, p_f: f64) {
        if !self.record {
            return;
        }
        let b = &self.state.body;
        self.rows.push(LogRow {
            t: self.state.time,
            position: b.position,
            euler: b.euler,
            velocity: b.velocity,
            omega: b.omega_body(),
            q: self.state.legs.as_array(),
            p_j,
            p_f,
            mode: self.mode,
        });
    }

    /// Flush a partial log interval.
    pub fn flush(&mut self) {
        if self.acc_t > 0.0 {
            let (pj, pf) = (self.acc_pj / self.acc_t, self.acc_pf / self.acc_t);
            self.push_row(pj, pf);
            self.acc_pj = 0.0;
            self.acc_pf = 0.0;
            self.acc_t = 0.0;
        }
    }

    fn set_mode(&mut self, mode: LocoMode) {
        if mode != self.mode {
            self.mode = mode;
            self.mode_timeline.push((self.state.time, mode));
        }
    }

    fn advance(&mut self, legs: LegKinematics, thrust: [f64; 4]) -> Result<(), Abort> {
        self.state.legs = legs;
        let dt = self.params.dt;
        let out = tick(self.env, self.ground, self.robot, &self.state, &thrust, dt)?;
        self.state = out.state;
        let e_j = out.joint_power * dt;
        let e_f = out.rotor_power * dt;
        self.joint_energy += e_j;
        self.rotor_energy += e_f;
        let seg = self.segment.min(self.segment_energy.len() - 1);
        self.segment_energy[seg] += e_j + e_f;
        self.acc_pj += e_j;
        self.acc_pf += e_f;
        self.acc_t += dt;
        self.ticks += 1;
        if self.ticks.is_multiple_of(self.log_every) {
            self.flush();
            if let Some(tr) = self.last_trace.take() {
                if self.record {
                    self.governor_trace.push(tr);
                }
            }
        }
        self.check_health()
    }

    fn check_health(&self) -> Result<(), Abort> {
        let b = &self.state.body;
        if !b.is_finite() {
            return Err(Abort("state diverged".into()));
        }
        if b.tilt().to_degrees() > self.params.fall_tilt_deg {
            return Err(Abort(format!("fell over (tilt {:.1} deg)", b.tilt().to_degrees())));
        }
        if self.env.body_collides(&b.position, self.params.collision_radius) {
            return Err(Abort(format!("collision at {:?}", b.position)));
        }
        if b.position.z < self.env.contact_surface(&b.position, CONTACT_TOL) {
            return Err(Abort("body below the ground".into()));
        }
        Ok(())
    }

    /// Restart the servo, governor and gait from the current legs.
    fn start_walking(&mut self) {
        self.servo = FootServo::from_legs(&self.state.legs, self.robot);
        self.governor.reset(&self.servo.q);
        self.gait = Some(TrotGait::new(self.params.gait, self.robot, self.state.time));
        self.prev_ref = None;
        self.set_mode(LocoMode::Walking);
    }

    fn servo_tick(&mut self, yaw_targets: [Vec3; 4], stance: [bool; 4]) -> Result<(), Abort> {
        let body = self.state.body;
        let x_r = yaw_targets;
        let dt = self.params.dt;
        let ctx = friction_context(&body, &self.servo, stance, self.prev_ref.as_ref(), dt, self.robot, self.ground);
        let (x_w, g) = self.governor.filter(&x_r, &ctx, dt)?;
        self.servo.ff = match self.prev_ref {
            Some(p) => std::array::from_fn(|i| (x_w[i] - p[i]) / dt),
            None => [Vec3::zeros(); 4],
        };
        self.prev_ref = Some(x_w);
        if stance.iter().any(|&s| s) {
            self.min_stance_h_w = self.min_stance_h_w.min(g.eval.min_w());
        }
        self.last_trace = Some(GovernorTraceRow {
            t: self.state.time,
            v: g.lyapunov,
            min_h_w: g.eval.min_w(),
            min_h_r: g.eval.min_r(),
            n_violated: g.eval.n_violated(),
        });
        let legs = self.servo.advance(&x_w, self.robot, self.params.dt);
        self.advance(legs, [0.0; 4])
    }

    /// One trot tick towards `target`; `None` walks in place to a stop.
    pub fn walk_tick(&mut self, target: Option<&Vec3>) -> Result<(), Abort> {
        if self.gait.is_none() {
            self.start_walking();
        }
        let body = self.state.body;
        let gp = self.params.gait;
        let t = self.state.time;
        let v = rot_z(-body.euler.z) * body.velocity;
        let gait = self.gait.as_mut().expect("gait running");
        let (yaw_targets, stance) = gait.targets(t, &v, || match target {
            Some(tg) => step_command(&body, tg, &gp),
            None => StepCommand::default(),
        });
        self.servo_tick(yaw_targets, stance)
    }

    /// Walk with a fixed command per half cycle (calibration).
    pub fn walk_tick_command(&mut self, command: StepCommand) -> Result<(), Abort> {
        if self.gait.is_none() {
            self.start_walking();
        }
        let t = self.state.time;
        let body = self.state.body;
        let v = rot_z(-body.euler.z) * body.velocity;
        let gait = self.gait.as_mut().expect("gait running");
        let (yaw_targets, stance) = gait.targets(t, &v, || command);
        self.servo_tick(yaw_targets, stance)
    }

    /// Four-foot stance on the nominal footholds for `duration`.
    pub fn hold(&mut self, duration: f64) -> Result<(), Abort> {
        let nominal = self.robot.hips.map(|h| h + Vec3::new(0.0, 0.0, -self.robot.stand_height));
        let end = self.state.time + duration - 0.5 * self.params.dt;
        while self.state.time < end {
            self.servo_tick(nominal, [true; 4])?;
        }
        Ok(())
    }

    /// Four-foot stance tracking the body-frame foot references
    /// `reference(t)`, `t` measured from the call.
    pub fn stance(&mut self, duration: f64, mut reference: impl FnMut(f64) -> [Vec3; 4]) -> Result<(), Abort> {
        let t0 = self.state.time;
        let end = t0 + duration - 0.5 * self.params.dt;
        while self.state.time < end {
            let x_r = reference(self.state.time - t0);
            self.servo_tick(x_r, [true; 4])?;
        }
        Ok(())
    }

    /// Walk to `target` (horizontal arrival radius).
    pub fn walk_to(&mut self, target: &Vec3) -> Result<(), Abort> {
        let deadline = self.state.time + self.params.waypoint_timeout;
        while (target - self.state.body.position).xy().norm() > self.params.arrival_walk {
            if self.state.time > deadline {
                return Err(Abort(format!("walking timeout, {:.2} m short", (target - self.state.body.position).xy().norm())));
            }
            self.walk_tick(Some(target))?;
        }
        Ok(())
    }

    /// Bring the trot to rest on four feet.
    pub fn stop_walking(&mut self) -> Result<(), Abort> {
        if self.gait.is_some() {
            let deadline = self.state.time + 4.0 * self.params.gait.half_period() + self.params.dt;
            loop {
                self.walk_tick(None)?;
                if self.gait.as_ref().is_some_and(|g| g.at_rest()) || self.state.time > deadline {
                    break;
                }
            }
            self.gait = None;
            self.prev_ref = None;
        }
        self.hold(self.params.settle_time)
    }

    pub fn transform(&mut self, direction: TransformDirection) -> Result<(), Abort> {
        let mode = match direction {
            TransformDirection::ToAir => LocoMode::TransformToAir,
            TransformDirection::ToGround => LocoMode::TransformToGround,
        };
        self.gait = None;
        self.set_mode(mode);
        let d = self.params.transform_duration;
        let t0 = self.state.time;
        let n = (d / self.params.dt).round() as u64;
        for k in 0..n {
            let legs = transform_sequence(direction, k as f64 * self.params.dt, d, self.robot);
            self.advance(legs, [0.0; 4])?;
            let tilt = self.state.body.tilt().to_degrees();
            if tilt > self.params.transform_tilt_max_deg {
                return Err(Abort(SimError::TransformAborted { tilt_deg: tilt }.to_string()));
            }
        }
        let mut end = transform_sequence(direction, d, d, self.robot);
        for l in end.legs.iter_mut() {
            l.frontal_rate = 0.0;
            l.sagittal_rate = 0.0;
            l.length_rate = 0.0;
        }
        self.state.legs = end;
        debug_assert!((self.state.time - t0 - d).abs() < 1e-6);
        match direction {
            TransformDirection::ToAir => self.set_mode(LocoMode::Flying),
            TransformDirection::ToGround => self.start_walking(),
        }
        Ok(())
    }

    fn fly_tick(&mut self, reference: &FlightReference, scale: f64) -> Result<(), Abort> {
        let legs = aerial_legs(self.robot);
        let thrust = flight_tracker(&self.state.body, &legs, reference, &self.params.flight, self.robot).map(|t| t * scale);
        self.advance(legs, thrust)
    }

    /// Track `traj`; `segments[k]` receives the energy spent on piece `k`.
    /// Returns the closest approach to each polyline vertex.
    pub fn fly(&mut self, traj: &PolylineTrajectory, segments: &[usize]) -> Result<Vec<f64>, Abort> {
        self.set_mode(LocoMode::Flying);
        let t0 = self.state.time;
        let mut closest = vec![f64::INFINITY; traj.points.len()];
        let end = *traj.points.last().expect("non-empty trajectory");
        let deadline = t0 + traj.duration() + self.params.waypoint_timeout;
        loop {
            let t = self.state.time - t0;
            let r = traj.reference(t);
            let (s, _, _) = traj.profile(t);
            self.segment = segments[traj.piece(s).min(segments.len() - 1)];
            self.fly_tick(&r, 1.0)?;
            let p = self.state.body.position;
            for (c, q) in closest.iter_mut().zip(&traj.points) {
                *c = c.min((p - q).norm());
            }
            if t >= traj.duration() && (p - end).norm() < LANDING_CAPTURE && self.state.body.velocity.norm() < LANDING_SPEED {
                break;
            }
            if self.state.time > deadline {
                return Err(Abort(format!("flight timeout, {:.2} m from the end", (p - end).norm())));
            }
        }
        Ok(closest)
    }

    /// Ramp the thrust down while holding `point`, then rest on the gear.
    pub fn land(&mut self, point: &Vec3) -> Result<(), Abort> {
        let hold = FlightReference::hold(*point, self.state.body.euler.z);
        let n = (self.params.thrust_ramp / self.params.dt).round().max(1.0) as u64;
        for k in 0..n {
            self.fly_tick(&hold, 1.0 - (k + 1) as f64 / n as f64)?;
        }
        let n_settle = (0.2 / self.params.dt).round() as u64;
        for _ in 0..n_settle {
            self.advance(aerial_legs(self.robot), [0.0; 4])?;
        }
        Ok(())
    }

    /// Hover in place for `duration`.
    pub fn hover(&mut self, duration: f64) -> Result<(), Abort> {
        let hold = FlightReference::hold(self.state.body.position, self.state.body.euler.z);
        let end = self.state.time + duration - 0.5 * self.params.dt;
        while self.state.time < end {
            self.fly_tick(&hold, 1.0)?;
        }
        Ok(())
    }
}

fn check_plan(plan: &MissionPlan, env: &EnvironmentMap) -> Result<(), SimError> {
    plan.validate().map_err(|e| SimError::InvalidPlan(e.to_string()))?;
    if let Some(k) = plan.waypoints.iter().position(|w| !env.is_point_free(&w.pos)) {
        return Err(SimError::MissionFailure { waypoint: k, reason: "waypoint is not in free space".into() });
    }
    for (k, (s, w)) in plan.segments.iter().zip(plan.waypoints.windows(2)).enumerate() {
        if s.kind == EdgeKind::Transition && (w[0].pos - w[1].pos).xy().norm() >= crate::planner::TRANSITION_RADIUS {
            return Err(SimError::InvalidPlan(format!("transition {k} is not co-located")));
        }
    }
    Ok(())
}

/// Execute `plan` and meter the energy per plan segment.
pub fn run_mission(
    plan: &MissionPlan,
    env: &EnvironmentMap,
    robot: &RobotParams,
    ground: &GroundModel,
    params: &SimParams,
) -> Result<MissionLog, SimError> {
    check_plan(plan, env)?;
    params.validate()?;
    robot.validate()?;
    ground.validate()?;
    let wps = &plan.waypoints;
    let n_seg = plan.segments.len();
    let yaw0 = wps.get(1).map(|w| (w.pos - wps[0].pos).xy()).filter(|d| d.norm() > 1e-9).map(|d| d.y.atan2(d.x)).unwrap_or(0.0);
    let mut run = match wps[0].mode {
        ModeTag::Walking => Runner::standing(env, robot, ground, *params, &wps[0].pos, yaw0, n_seg),
        ModeTag::Flying => Runner::hovering(env, robot, ground, *params, &wps[0].pos, yaw0, n_seg),
    };
    let mut arrivals: Vec<Option<f64>> = vec![None; wps.len()];
    arrivals[0] = Some(0.0);
    let mut n_transformations = 0;

    let mut execute = |run: &mut Runner| -> Result<(), (usize, Abort)> {
        let mut k = 0;
        while k < n_seg {
            let kind = plan.segments[k].kind;
            run.segment = k;
            if kind == EdgeKind::Walk {
                let target = body_target(&wps[k + 1].pos, robot);
                run.walk_to(&target).map_err(|e| (k + 1, e))?;
                arrivals[k + 1] = Some(run.time());
                if k + 1 == n_seg || plan.segments[k + 1].kind != EdgeKind::Walk {
                    run.stop_walking().map_err(|e| (k + 1, e))?;
                }
                k += 1;
                continue;
            }
            // flight block: optional take-off transition, fly edges, optional landing transition
            let takeoff = kind == EdgeKind::Transition && wps[k].mode == ModeTag::Walking;
            if takeoff {
                run.stop_walking().map_err(|e| (k + 1, e))?;
                run.transform(TransformDirection::ToAir).map_err(|e| (k + 1, e))?;
                n_transformations += 1;
            }
            let first_fly_wp = if takeoff { k + 1 } else { k };
            let mut j = first_fly_wp;
            while j < n_seg && plan.segments[j].kind == EdgeKind::Fly {
                j += 1;
            }
            // waypoints first_fly_wp..=j are flying; segment j (if any) lands
            let lands = j < n_seg;
            let mut points = vec![run.state.body.position];
            let mut owners = Vec::new();
            let mut vertex_wp = vec![None];
            for (w, wp) in wps.iter().enumerate().take(j + 1).skip(first_fly_wp) {
                points.push(body_target(&wp.pos, robot));
                vertex_wp.push(Some(w));
                owners.push(if w == first_fly_wp { if takeoff { k } else { w.saturating_sub(1).max(k) } } else { w - 1 });
            }
            if lands {
                let wl = &wps[j + 1].pos;
                points.push(Vec3::new(wl.x, wl.y, wl.z + params.gear_height + params.landing_clearance));
                vertex_wp.push(None);
                owners.push(j);
            }
            if owners.is_empty() {
                owners.push(k);
            }
            let traj = PolylineTrajectory::new(points, params.flight.speed, params.flight.accel, run.state.body.euler.z);
            let closest = run.fly(&traj, &owners).map_err(|e| (j, e))?;
            for (c, w) in closest.iter().zip(&vertex_wp) {
                if let Some(w) = w {
                    if *c > params.arrival_fly {
                        return Err((*w, Abort(format!("missed flying waypoint by {c:.2} m"))));
                    }
                    arrivals[*w] = Some(run.time());
                }
            }
            if lands {
                run.segment = j;
                run.land(traj.points.last().expect("landing point")).map_err(|e| (j + 1, e))?;
                run.transform(TransformDirection::ToGround).map_err(|e| (j + 1, e))?;
                n_transformations += 1;
                let target = body_target(&wps[j + 1].pos, robot);
                if j + 1 == n_seg && (target - run.state.body.position).xy().norm() > params.arrival_walk {
                    run.walk_to(&target).map_err(|e| (j + 1, e))?;
                    run.stop_walking().map_err(|e| (j + 1, e))?;
                }
                arrivals[j + 1] = Some(run.time());
                k = j + 1;
            } else {
                k = n_seg;
            }
        }
        Ok(())
    };

    let result = match execute(&mut run) {
        Ok(()) => MissionResult::Completed,
        Err((waypoint, Abort(reason))) => MissionResult::Failed { waypoint, reason },
    };
    run.flush();
    let goal = body_target(&wps.last().expect("non-empty plan").pos, robot);
    let final_position = run.state.body.position;
    let segments = plan
        .segments
        .iter()
        .zip(&run.segment_energy)
        .map(|(s, &e)| SegmentLedger { kind: s.kind, planned_j: s.energy, realized_j: e })
        .collect();
    Ok(MissionLog {
        rows: run.rows,
        governor_trace: run.governor_trace,
        segments,
        mode_timeline: run.mode_timeline,
        arrivals,
        result,
        n_transformations,
        min_stance_h_w: run.min_stance_h_w,
        final_position,
        final_error: (final_position - goal).norm(),
        joint_energy: run.joint_energy,
        rotor_energy: run.rotor_energy,
        duration: run.state.time,
    })
}
