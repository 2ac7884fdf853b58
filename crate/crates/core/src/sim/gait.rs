//! Trot gait, unicycle walking policy and the foot-space leg servo.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::geometry::Vec3;
use crate::governor::{friction_constraints, update, ConstraintEval, FrictionContext, GovernorGains, GovernorState};
use crate::rom::kinematics::rot_z;
use crate::rom::{BodyState, GroundModel, LegJoint, LegKinematics, RobotParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaitParams {
    /// Stride frequency, Hz.
    pub frequency: f64,
    /// Half stance sweep, m.
    pub sweep: f64,
    /// Swing apex height, m.
    pub lift: f64,
    /// Largest body rotation per half cycle, rad.
    pub turn_step: f64,
    /// Heading error above which the robot turns in place, rad.
    pub heading_tol: f64,
    /// Distance inside which the robot no longer turns in place, m.
    pub approach_radius: f64,
    /// Swing touchdown shift per unit velocity error, s.
    pub placement_gain: f64,
    /// Largest touchdown shift, m.
    pub placement_max: f64,
}

impl Default for GaitParams {
    fn default() -> Self {
        Self { frequency: 2.0, sweep: 0.03, lift: 0.04, turn_step: 0.125, heading_tol: 0.1, approach_radius: 0.3, placement_gain: 0.15, placement_max: 0.05 }
    }
}

impl GaitParams {
    pub fn half_period(&self) -> f64 {
        0.5 / self.frequency
    }

    /// Nominal forward speed, m/s.
    pub fn speed(&self) -> f64 {
        2.0 * self.sweep / self.half_period()
    }
}

pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Body motion requested for one half cycle.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepCommand {
    pub stride: f64,
    pub turn: f64,
}

/// Unicycle policy: turn in place while the heading error exceeds the
/// tolerance, otherwise walk forward with a small heading correction.
/// Close to the target only a target behind the robot triggers a turn.
pub fn step_command(body: &BodyState, target: &Vec3, params: &GaitParams) -> StepCommand {
    let d = (target - body.position).xy();
    let err = heading_error(body, target);
    let tol = if d.norm() < params.approach_radius { FRAC_PI_2 } else { params.heading_tol };
    if err.abs() > tol {
        StepCommand { stride: 0.0, turn: err.clamp(-params.turn_step, params.turn_step) }
    } else {
        StepCommand { stride: d.norm().min(2.0 * params.sweep), turn: err.clamp(-params.turn_step, params.turn_step) }
    }
}

pub fn heading_error(body: &BodyState, target: &Vec3) -> f64 {
    let d = (target - body.position).xy();
    if d.norm() < 1e-9 {
        return 0.0;
    }
    wrap_angle(d.y.atan2(d.x) - body.euler.z)
}

/// Foot targets (yaw frame, COM relative) for a trot: diagonal pairs
/// {0, 3} and {1, 2} alternate stance every half period.
#[derive(Clone, Debug, PartialEq)]
pub struct TrotGait {
    pub params: GaitParams,
    nominal: [Vec3; 4],
    start: [Vec3; 4],
    end: [Vec3; 4],
    last: [Vec3; 4],
    /// Target velocities at the start and end of the current half.
    v_start: [Vec3; 4],
    v_end: [Vec3; 4],
    half: u64,
    idle_halves: u32,
    t0: f64,
    pub command: StepCommand,
}

impl TrotGait {
    pub fn new(params: GaitParams, robot: &RobotParams, t0: f64) -> Self {
        let nominal = robot.hips.map(|h| h + Vec3::new(0.0, 0.0, -robot.stand_height));
        let z = [Vec3::zeros(); 4];
        Self { params, nominal, start: nominal, end: nominal, last: nominal, v_start: z, v_end: z, half: 0, idle_halves: 0, t0, command: StepCommand::default() }
    }

    pub fn nominal(&self) -> [Vec3; 4] {
        self.nominal
    }

    /// Legs {0, 3} are in stance on even half cycles.
    pub fn stance(&self) -> [bool; 4] {
        let even = self.half.is_multiple_of(2);
        [even, !even, !even, even]
    }

    fn touchdown(&self, i: usize, c: &StepCommand) -> Vec3 {
        rot_z(0.5 * c.turn) * self.nominal[i] + Vec3::new(0.5 * c.stride, 0.0, 0.0)
    }

    fn liftoff(&self, i: usize, c: &StepCommand) -> Vec3 {
        rot_z(-0.5 * c.turn) * self.nominal[i] - Vec3::new(0.5 * c.stride, 0.0, 0.0)
    }

    /// Start a new half cycle with `command`, continuing from the current
    /// foot targets.
    fn begin_half(&mut self, command: StepCommand) {
        self.command = command;
        self.idle_halves = if command == StepCommand::default() { self.idle_halves + 1 } else { 0 };
        let stance = self.stance();
        let hp = self.params.half_period();
        for i in 0..4 {
            let sweep = (self.liftoff(i, &command) - self.touchdown(i, &command)) / hp;
            self.start[i] = self.last[i];
            if stance[i] {
                self.end[i] = self.liftoff(i, &command);
                self.v_start[i] = (self.end[i] - self.start[i]) / hp;
                self.v_end[i] = self.v_start[i];
            } else {
                self.end[i] = self.touchdown(i, &command);
                self.v_start[i] = self.v_end[i];
                self.v_end[i] = sweep;
            }
        }
    }

    /// Touchdown shift for a yaw-frame body velocity `v`.
    pub fn placement(&self, v: &Vec3) -> Vec3 {
        let v_cmd = self.command.stride / self.params.half_period();
        let e = Vec3::new(v.x - v_cmd, v.y, 0.0) * self.params.placement_gain;
        let n = e.norm();
        if n > self.params.placement_max {
            e * (self.params.placement_max / n)
        } else {
            e
        }
    }

    /// Advance to time `t` with yaw-frame body velocity `v`; `next`
    /// supplies the command whenever a half cycle begins. Returns the
    /// foot targets for a level body and the stance flags.
    pub fn targets(&mut self, t: f64, v: &Vec3, mut next: impl FnMut() -> StepCommand) -> ([Vec3; 4], [bool; 4]) {
        let hp = self.params.half_period();
        let k = ((t - self.t0) / hp).floor().max(0.0) as u64 + 1;
        while self.half < k {
            self.half += 1;
            self.begin_half(next());
        }
        let s = (((t - self.t0) / hp) - (k - 1) as f64).clamp(0.0, 1.0);
        let stance = self.stance();
        let shift = self.placement(v);
        let out = std::array::from_fn(|i| {
            let (a, b) = (self.start[i], self.end[i]);
            if stance[i] {
                a + (b - a) * s
            } else {
                // cubic Hermite matching the ground speed at both ends
                let (s2, s3) = (s * s, s * s * s);
                let p = a * (2.0 * s3 - 3.0 * s2 + 1.0)
                    + self.v_start[i] * (hp * (s3 - 2.0 * s2 + s))
                    + (b + shift) * (3.0 * s2 - 2.0 * s3)
                    + self.v_end[i] * (hp * (s3 - s2));
                p + Vec3::new(0.0, 0.0, self.params.lift * (PI * s).sin().powi(2))
            }
        });
        self.last = out;
        (out, stance)
    }

    /// Whether the last three half cycles had no motion command.
    pub fn at_rest(&self) -> bool {
        self.idle_halves >= 3
    }
}

/// Per-leg foot position and velocity servo in the body frame:
/// `q̈ = k_p (x − q) + k_d (v_ff − q̇)`, speed limited.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FootServo {
    pub q: [Vec3; 4],
    pub qd: [Vec3; 4],
    /// Reference velocity feed-forward.
    pub ff: [Vec3; 4],
}

impl FootServo {
    pub fn from_legs(legs: &LegKinematics, robot: &RobotParams) -> Self {
        let q = std::array::from_fn(|i| robot.hips[i] + legs.legs[i].foot_vector());
        let qd = std::array::from_fn(|i| {
            let l = &legs.legs[i];
            l.jacobian(l.length, true) * l.rates()
        });
        Self { q, qd, ff: [Vec3::zeros(); 4] }
    }

    /// Integrate one tick towards `x` and return the matching joint state.
    pub fn advance(&mut self, x: &[Vec3; 4], robot: &RobotParams, dt: f64) -> LegKinematics {
        let mut legs = LegKinematics::default();
        for i in 0..4 {
            let acc = (x[i] - self.q[i]) * robot.servo_kp + (self.ff[i] - self.qd[i]) * robot.servo_kd;
            let mut v = self.qd[i] + acc * dt;
            let n = v.norm();
            if n > robot.servo_speed_max {
                v *= robot.servo_speed_max / n;
            }
            self.qd[i] = v;
            legs.legs[i] = LegJoint::from_foot_state(&(self.q[i] - robot.hips[i]), &v);
            self.q[i] += v * dt;
        }
        legs
    }
}

pub fn flatten(x: &[Vec3; 4]) -> DVector<f64> {
    DVector::from_iterator(12, x.iter().flat_map(|p| [p.x, p.y, p.z]))
}

pub fn unflatten(x: &DVector<f64>) -> [Vec3; 4] {
    std::array::from_fn(|i| Vec3::new(x[3 * i], x[3 * i + 1], x[3 * i + 2]))
}

/// Friction model seen by the governor for the current servo state.
/// `prev_ref` is the reference applied on the previous tick, if any; the
/// servo feed-forward is its finite difference over `dt`.
pub fn friction_context(
    body: &BodyState,
    servo: &FootServo,
    stance: [bool; 4],
    prev_ref: Option<&[Vec3; 4]>,
    dt: f64,
    robot: &RobotParams,
    ground: &GroundModel,
) -> FrictionContext {
    FrictionContext {
        rotation: body.rotation(),
        foot_pos: servo.q,
        foot_vel: servo.qd,
        prev_ref: prev_ref.copied().unwrap_or(servo.q),
        ff_rate: if prev_ref.is_some() { 1.0 / dt } else { 0.0 },
        stance,
        mass: robot.mass,
        gravity: robot.gravity,
        kp: robot.servo_kp,
        kd: robot.servo_kd,
        mu: ground.mu_c,
        margin: 0.0,
    }
}

/// Largest fraction of the step `from → to` that keeps every pyramid row
/// above `min(h, 0)` on the true (kinked) constraints.
fn backtrack(ctx: &FrictionContext, c: &ConstraintEval, from: &DVector<f64>, to: &DVector<f64>) -> DVector<f64> {
    let floor: Vec<f64> = c.h_w.iter().map(|&h| h.min(0.0) - 1e-9).collect();
    let ok = |x: &DVector<f64>| ctx.constraints(x).iter().zip(&floor).all(|(h, f)| h >= f);
    if ctx.n_stance() == 0 || ok(to) {
        return to.clone();
    }
    let d = to - from;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BACKTRACK_ITERS {
        let mid = 0.5 * (lo + hi);
        if ok(&(from + &d * mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    from + d * lo
}

const BACKTRACK_ITERS: usize = 40;

/// Reference governor filtering the stance-foot references.
#[derive(Clone, Debug, PartialEq)]
pub struct GovernedReference {
    pub state: GovernorState,
    pub enabled: bool,
    /// Row tightening applied inside the governor, N.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GovernorTick {
    /// Constraints at the applied (post-update) and desired references,
    /// untightened.
    pub eval: ConstraintEval,
    pub lyapunov: f64,
}

impl GovernedReference {
    pub fn new(x0: &[Vec3; 4], gains: GovernorGains, enabled: bool, margin: f64) -> Self {
        let x = flatten(x0);
        let n = x.len();
        let state = GovernorState { x_w: x.clone(), x_r: x, p: DMatrix::identity(n, n), gains };
        Self { state, enabled, margin }
    }

    /// Filter `x_r` for one tick; swing legs pass through unchanged.
    pub fn filter(
        &mut self,
        x_r: &[Vec3; 4],
        ctx: &FrictionContext,
        dt: f64,
    ) -> Result<([Vec3; 4], GovernorTick), SimError> {
        self.state.x_r = flatten(x_r);
        if self.enabled {
            let tight = FrictionContext { margin: self.margin, ..*ctx };
            let c = friction_constraints(&tight, &self.state.x_w, &self.state.x_r);
            let next = update(&self.state, &c, dt)?;
            self.state.x_w = backtrack(&tight, &c, &self.state.x_w, &next.x_w);
        } else {
            self.state.x_w = self.state.x_r.clone();
        }
        for i in 0..4 {
            if !ctx.stance[i] {
                for k in 0..3 {
                    self.state.x_w[3 * i + k] = self.state.x_r[3 * i + k];
                }
            }
        }
        let eval = friction_constraints(ctx, &self.state.x_w, &self.state.x_r);
        let lyapunov = crate::governor::lyapunov_value(&self.state);
        Ok((unflatten(&self.state.x_w), GovernorTick { eval, lyapunov }))
    }

    pub fn reset(&mut self, x: &[Vec3; 4]) {
        self.state.x_w = flatten(x);
        self.state.x_r = self.state.x_w.clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body_facing(yaw: f64) -> BodyState {
        let mut b = BodyState::at(Vec3::new(0.0, 0.0, 0.25));
        b.euler.z = yaw;
        b
    }

    #[test]
    fn aligned_target_walks_straight() {
        let p = GaitParams::default();
        let c = step_command(&body_facing(0.0), &Vec3::new(3.0, 0.0, 0.0), &p);
        assert_eq!(c, StepCommand { stride: 0.06, turn: 0.0 });
        assert!((p.speed() - 0.24).abs() < 1e-12);
    }

    #[test]
    fn target_behind_turns_in_place() {
        let p = GaitParams::default();
        let c = step_command(&body_facing(0.0), &Vec3::new(-3.0, 0.1, 0.0), &p);
        assert_eq!(c.stride, 0.0);
        assert_eq!(c.turn, p.turn_step);
        let c2 = step_command(&body_facing(PI - 0.05), &Vec3::new(-3.0, 0.0, 0.0), &p);
        assert!(c2.stride > 0.0);
    }

    #[test]
    fn wrap_is_in_range() {
        for a in [-10.0, -PI, 0.0, PI, 3.5, 10.0] {
            let w = wrap_angle(a);
            assert!(w > -PI && w <= PI);
            assert!(((a - w) / (2.0 * PI)).fract().abs() < 1e-9 || ((a - w) / (2.0 * PI)).fract().abs() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn trot_alternates_diagonals_and_sweeps_stance() {
        let robot = RobotParams::default();
        let mut g = TrotGait::new(GaitParams::default(), &robot, 0.0);
        let cmd = StepCommand { stride: 0.06, turn: 0.0 };
        let (a, s0) = g.targets(0.0, &Vec3::zeros(), || cmd);
        assert_eq!(s0, [false, true, true, false]);
        let (b, _) = g.targets(0.2499, &Vec3::zeros(), || cmd);
        // stance foot moves backwards by almost a full stride
        assert!((a[1].x - b[1].x - 0.03).abs() < 1e-3);
        // swing foot is on the ground at both ends and lifted mid-swing
        let (m, _) = g.targets(0.125, &Vec3::zeros(), || cmd);
        assert!((m[0].z - (a[0].z + 0.04)).abs() < 1e-9);
        let (_, s1) = g.targets(0.26, &Vec3::zeros(), || cmd);
        assert_eq!(s1, [true, false, false, true]);
    }

    #[test]
    fn servo_converges_to_fixed_reference() {
        let robot = RobotParams::default();
        let legs = LegKinematics { legs: [LegJoint::new(0.0, 0.0, 0.25); 4] };
        let mut s = FootServo::from_legs(&legs, &robot);
        let x = s.q.map(|q| q + Vec3::new(0.02, -0.01, 0.01));
        for _ in 0..2000 {
            s.advance(&x, &robot, 1e-3);
        }
        for i in 0..4 {
            assert!((s.q[i] - x[i]).norm() < 1e-6);
        }
    }

    #[test]
    fn swing_lands_ahead_of_velocity_error() {
        let robot = RobotParams::default();
        let mut g = TrotGait::new(GaitParams::default(), &robot, 0.0);
        let v = Vec3::new(0.0, 0.2, 0.0);
        let (_, stance) = g.targets(0.0, &v, StepCommand::default);
        let (end, _) = g.targets(0.2499, &v, StepCommand::default);
        let swing = stance.iter().position(|s| !s).unwrap();
        assert!((end[swing].y - g.nominal()[swing].y - 0.03).abs() < 1e-3);
        assert_eq!(g.placement(&Vec3::new(0.0, 5.0, 0.0)).norm(), 0.05);
    }
}
