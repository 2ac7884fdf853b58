//! Cascaded flight controller and polyline trajectories.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;
use crate::rom::kinematics::{euler_rate_map, rot_z};
use crate::rom::{BodyState, LegKinematics, RobotParams};

use super::physics::thruster_layout;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlightParams {
    /// Cruise speed, m/s.
    pub speed: f64,
    /// Trajectory acceleration, m/s².
    pub accel: f64,
    pub kp_pos: f64,
    pub kd_pos: f64,
    pub kp_att: f64,
    pub kd_att: f64,
    /// Largest commanded roll or pitch, rad.
    pub tilt_max: f64,
}

impl Default for FlightParams {
    fn default() -> Self {
        Self { speed: 2.0, accel: 4.0, kp_pos: 16.0, kd_pos: 8.0, kp_att: 225.0, kd_att: 30.0, tilt_max: 0.35 }
    }
}

/// Position, velocity and feed-forward acceleration to track.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FlightReference {
    pub pos: Vec3,
    pub vel: Vec3,
    pub acc: Vec3,
    pub yaw: f64,
}

impl FlightReference {
    pub fn hold(pos: Vec3, yaw: f64) -> Self {
        Self { pos, yaw, ..Default::default() }
    }
}

/// Solve for four rotor thrusts giving total thrust `t` and body torque
/// `tau`, clamped to `[0, T_max]`.
pub fn mix(robot: &RobotParams, legs: &LegKinematics, t: f64, tau: &Vec3) -> [f64; 4] {
    let r = thruster_layout(robot, legs);
    let a = Matrix4::from_fn(|row, i| match row {
        0 => 1.0,
        1 => r[i].y,
        2 => -r[i].x,
        _ => robot.spin(i) * robot.yaw_torque_coeff,
    });
    let rhs = Vector4::new(t, tau.x, tau.y, tau.z);
    let sol = a.try_inverse().map(|inv| inv * rhs).unwrap_or_else(|| Vector4::repeat(t / 4.0));
    std::array::from_fn(|i| sol[i].clamp(0.0, robot.thrust_max))
}

/// Position loop → attitude targets → attitude loop → rotor thrusts.
pub fn flight_tracker(
    body: &BodyState,
    legs: &LegKinematics,
    reference: &FlightReference,
    params: &FlightParams,
    robot: &RobotParams,
) -> [f64; 4] {
    let a = (reference.pos - body.position) * params.kp_pos + (reference.vel - body.velocity) * params.kd_pos + reference.acc;
    let mut f = (a + Vec3::new(0.0, 0.0, robot.gravity)) * robot.mass;
    f.z = f.z.max(1e-6);
    let lateral = f.xy().norm();
    let lateral_max = f.z * params.tilt_max.tan();
    if lateral > lateral_max {
        let k = lateral_max / lateral;
        f.x *= k;
        f.y *= k;
    }
    let f_yaw = rot_z(-reference.yaw) * f;
    let pitch_d = f_yaw.x.atan2(f_yaw.z.max(1e-6)).clamp(-params.tilt_max, params.tilt_max);
    let roll_d = (-f_yaw.y).atan2(f_yaw.xz().norm().max(1e-6)).clamp(-params.tilt_max, params.tilt_max);
    let yaw_err = crate::sim::gait::wrap_angle(reference.yaw - body.euler.z);
    let err = Vec3::new(roll_d - body.euler.x, pitch_d - body.euler.y, yaw_err);
    let alpha = euler_rate_map(&body.euler) * err * params.kp_att - body.omega_body() * params.kd_att;
    let tau = robot.inertia * alpha;
    let up = body.rotation() * Vec3::z();
    let thrust = f.dot(&up).max(0.0);
    mix(robot, legs, thrust, &tau)
}

/// One straight piece of a polyline with its own trapezoidal profile.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Piece {
    t0: f64,
    len: f64,
    v0: f64,
    v1: f64,
    vp: f64,
    t_acc: f64,
    t_cruise: f64,
    t_dec: f64,
}

impl Piece {
    fn new(t0: f64, len: f64, v0: f64, v1: f64, speed: f64, accel: f64) -> Self {
        let vp = speed.min(((2.0 * accel * len + v0 * v0 + v1 * v1) / 2.0).sqrt()).max(v0.max(v1));
        let t_acc = (vp - v0) / accel;
        let t_dec = (vp - v1) / accel;
        let d = (2.0 * vp * vp - v0 * v0 - v1 * v1) / (2.0 * accel);
        let t_cruise = if vp > 0.0 { ((len - d) / vp).max(0.0) } else { 0.0 };
        Self { t0, len, v0, v1, vp, t_acc, t_cruise, t_dec }
    }

    fn duration(&self) -> f64 {
        self.t_acc + self.t_cruise + self.t_dec
    }

    /// Local arc length, speed and acceleration at local time `t`.
    fn at(&self, t: f64, accel: f64) -> (f64, f64, f64) {
        let t = t.clamp(0.0, self.duration());
        let (ta, tc) = (self.t_acc, self.t_cruise);
        if t < ta {
            (self.v0 * t + 0.5 * accel * t * t, self.v0 + accel * t, accel)
        } else if t < ta + tc {
            let da = 0.5 * (self.v0 + self.vp) * ta;
            (da + self.vp * (t - ta), self.vp, 0.0)
        } else {
            let r = self.duration() - t;
            let s = self.len - self.v1 * r - 0.5 * accel * r * r;
            (s.max(0.0), self.v1 + accel * r, if r > 0.0 { -accel } else { 0.0 })
        }
    }
}

/// Polyline flown with acceleration-limited speed that slows at corners.
#[derive(Clone, Debug, PartialEq)]
pub struct PolylineTrajectory {
    pub points: Vec<Vec3>,
    /// Cumulative arc length at each point.
    pub stations: Vec<f64>,
    speed: f64,
    accel: f64,
    pieces: Vec<Piece>,
    t_total: f64,
    pub yaw: f64,
}

impl PolylineTrajectory {
    pub fn new(points: Vec<Vec3>, speed: f64, accel: f64, yaw: f64) -> Self {
        let mut stations = vec![0.0];
        for w in points.windows(2) {
            stations.push(stations.last().unwrap() + (w[1] - w[0]).norm());
        }
        let n = points.len();
        let lens: Vec<f64> = stations.windows(2).map(|w| w[1] - w[0]).collect();
        let mut cap = vec![0.0; n];
        for k in 1..n.saturating_sub(1) {
            let (a, b) = (points[k] - points[k - 1], points[k + 1] - points[k]);
            let c = if a.norm() > 0.0 && b.norm() > 0.0 { a.normalize().dot(&b.normalize()).max(0.0) } else { 1.0 };
            cap[k] = speed * c * c;
        }
        for k in 0..lens.len() {
            cap[k + 1] = f64::min(cap[k + 1], (cap[k] * cap[k] + 2.0 * accel * lens[k]).sqrt());
        }
        for k in (0..lens.len()).rev() {
            cap[k] = f64::min(cap[k], (cap[k + 1] * cap[k + 1] + 2.0 * accel * lens[k]).sqrt());
        }
        let mut t = 0.0;
        let pieces = lens
            .iter()
            .enumerate()
            .map(|(k, &len)| {
                let p = Piece::new(t, len, cap[k], cap[k + 1], speed, accel);
                t += p.duration();
                p
            })
            .collect();
        Self { points, stations, speed, accel, pieces, t_total: t, yaw }
    }

    pub fn length(&self) -> f64 {
        *self.stations.last().unwrap()
    }

    pub fn duration(&self) -> f64 {
        self.t_total
    }

    /// Arc length, speed and tangential acceleration at time `t`.
    pub fn profile(&self, t: f64) -> (f64, f64, f64) {
        if t >= self.t_total {
            return (self.length(), 0.0, 0.0);
        }
        let t = t.max(0.0);
        let Some(k) = self.pieces.iter().rposition(|p| p.t0 <= t && p.len > 0.0) else {
            return (0.0, 0.0, 0.0);
        };
        let (s, v, a) = self.pieces[k].at(t - self.pieces[k].t0, self.accel);
        (self.stations[k] + s.min(self.pieces[k].len), v, a)
    }

    /// Index of the polyline piece containing arc length `s`.
    pub fn piece(&self, s: f64) -> usize {
        let n = self.points.len().saturating_sub(1).max(1);
        (1..self.stations.len()).find(|&k| s < self.stations[k]).map(|k| k - 1).unwrap_or(n - 1)
    }

    pub fn reference(&self, t: f64) -> FlightReference {
        let (s, v, a) = self.profile(t);
        if self.points.len() < 2 || self.length() == 0.0 {
            return FlightReference::hold(self.points[0], self.yaw);
        }
        let k = self.piece(s);
        let (p0, p1) = (self.points[k], self.points[k + 1]);
        let seg = self.stations[k + 1] - self.stations[k];
        let dir = if seg > 0.0 { (p1 - p0) / seg } else { Vec3::zeros() };
        FlightReference { pos: p0 + dir * (s - self.stations[k]).min(seg), vel: dir * v, acc: dir * a, yaw: self.yaw }
    }

    pub fn cruise_speed(&self) -> f64 {
        self.speed
    }
}
