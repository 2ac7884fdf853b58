//! Body attitude (Z-Y-X Euler angles) and leg-chain kinematics.
//!
//! Euler angles are stored as `(roll, pitch, yaw)` and compose as
//! `R = Rz(yaw) · Ry(pitch) · Rx(roll)` (body → inertial). Generalized
//! rotational velocities are the Euler rates; body angular velocity is
//! `ω_b = H(θ) · θ̇`.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;

pub fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

pub fn rotation(euler: &Vec3) -> Matrix3<f64> {
    rot_z(euler.z) * rot_y(euler.y) * rot_x(euler.x)
}

/// Euler-rate map `H(θ)` with `ω_body = H θ̇`.
pub fn euler_rate_map(euler: &Vec3) -> Matrix3<f64> {
    let (sr, cr) = euler.x.sin_cos();
    let (sp, cp) = euler.y.sin_cos();
    Matrix3::new(1.0, 0.0, -sp, 0.0, cr, sr * cp, 0.0, -sr, cr * cp)
}

/// Time derivative of `H(θ)` along `θ̇`.
pub fn euler_rate_map_dot(euler: &Vec3, rates: &Vec3) -> Matrix3<f64> {
    let (sr, cr) = euler.x.sin_cos();
    let (sp, cp) = euler.y.sin_cos();
    let d_roll = Matrix3::new(0.0, 0.0, 0.0, 0.0, -sr, cr * cp, 0.0, -cr, -sr * cp);
    let d_pitch = Matrix3::new(0.0, 0.0, -cp, 0.0, 0.0, -sr * sp, 0.0, 0.0, -cr * sp);
    d_roll * rates.x + d_pitch * rates.y
}

pub fn skew(v: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// One leg: hip frontal angle, hip sagittal angle, leg length, and rates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LegJoint {
    pub frontal: f64,
    pub sagittal: f64,
    pub length: f64,
    pub frontal_rate: f64,
    pub sagittal_rate: f64,
    pub length_rate: f64,
}

impl LegJoint {
    pub fn new(frontal: f64, sagittal: f64, length: f64) -> Self {
        Self { frontal, sagittal, length, ..Default::default() }
    }

    pub fn angles(&self) -> Vec3 {
        Vec3::new(self.frontal, self.sagittal, self.length)
    }

    pub fn rates(&self) -> Vec3 {
        Vec3::new(self.frontal_rate, self.sagittal_rate, self.length_rate)
    }

    /// Joint values advanced by `tau` seconds at constant rate.
    pub fn extrapolate(&self, tau: f64) -> Self {
        Self {
            frontal: self.frontal + tau * self.frontal_rate,
            sagittal: self.sagittal + tau * self.sagittal_rate,
            length: self.length + tau * self.length_rate,
            ..*self
        }
    }

    /// Hip-to-point vector in the body frame for a point `d` metres along
    /// the leg.
    pub fn point_along(&self, d: f64) -> Vec3 {
        let (sf, cf) = self.frontal.sin_cos();
        let (ss, cs) = self.sagittal.sin_cos();
        Vec3::new(d * ss, sf * d * cs, -cf * d * cs)
    }

    pub fn foot_vector(&self) -> Vec3 {
        self.point_along(self.length)
    }

    /// Jacobian of the point `d` along the leg w.r.t. (frontal, sagittal,
    /// length); `moves_with_length` selects the foot (true) or a fixed
    /// mount such as the thruster (false).
    pub fn jacobian(&self, d: f64, moves_with_length: bool) -> Matrix3<f64> {
        let (sf, cf) = self.frontal.sin_cos();
        let (ss, cs) = self.sagittal.sin_cos();
        let dl = if moves_with_length { Vec3::new(ss, sf * cs, -cf * cs) } else { Vec3::zeros() };
        Matrix3::from_columns(&[
            Vec3::new(0.0, cf * d * cs, sf * d * cs),
            Vec3::new(d * cs, -sf * d * ss, cf * d * ss),
            dl,
        ])
    }

    /// Unit thrust axis (hip sagittal joint axis) in the body frame,
    /// oriented by `side`.
    pub fn thrust_axis(&self, side: f64) -> Vec3 {
        let (sf, cf) = self.frontal.sin_cos();
        Vec3::new(0.0, cf, sf) * side
    }

    /// Inverse kinematics from a hip-relative foot vector.
    pub fn from_foot_vector(f: &Vec3) -> Self {
        let l = f.norm();
        let sagittal = if l > 0.0 { (f.x / l).clamp(-1.0, 1.0).asin() } else { 0.0 };
        let frontal = f.y.atan2(-f.z);
        Self::new(frontal, sagittal, l)
    }

    /// Joints and rates from a hip-relative foot position and velocity.
    pub fn from_foot_state(f: &Vec3, fdot: &Vec3) -> Self {
        let mut j = Self::from_foot_vector(f);
        let jac = j.jacobian(j.length, true);
        let rates = jac.try_inverse().map(|inv| inv * fdot).unwrap_or_else(Vec3::zeros);
        j.frontal_rate = rates.x;
        j.sagittal_rate = rates.y;
        j.length_rate = rates.z;
        j
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LegKinematics {
    pub legs: [LegJoint; 4],
}

impl LegKinematics {
    /// Flattened `q_k` as (frontal, sagittal, length) per leg.
    pub fn as_array(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        for (i, l) in self.legs.iter().enumerate() {
            out[3 * i] = l.frontal;
            out[3 * i + 1] = l.sagittal;
            out[3 * i + 2] = l.length;
        }
        out
    }

    pub fn extrapolate(&self, tau: f64) -> Self {
        Self { legs: self.legs.map(|l| l.extrapolate(tau)) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn straight_leg_points_down() {
        let j = LegJoint::new(0.0, 0.0, 0.3);
        assert!((j.foot_vector() - Vec3::new(0.0, 0.0, -0.3)).norm() < 1e-15);
    }

    #[test]
    fn sagittal_quarter_turn_points_forward() {
        let j = LegJoint::new(0.0, FRAC_PI_2, 0.3);
        let f = j.foot_vector();
        assert!((f - Vec3::new(0.3, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn chain_matches_composed_rotations() {
        for (a, b, l) in [(0.3, -0.7, 0.21), (-1.2, 0.4, 0.15), (1.5, 1.1, 0.3)] {
            let j = LegJoint::new(a, b, l);
            // Rx(frontal) · Ry(sagittal) applied to a straight-down leg, with
            // the sagittal sign chosen so positive angles swing forward.
            let oracle = rot_x(a) * rot_y(-b) * Vec3::new(0.0, 0.0, -l);
            assert!((j.foot_vector() - oracle).norm() < 1e-14);
        }
    }

    #[test]
    fn inverse_kinematics_round_trips() {
        for (a, b, l) in [(0.3, -0.7, 0.21), (-1.2, 0.4, 0.15), (FRAC_PI_2, 0.0, 0.2)] {
            let j = LegJoint::new(a, b, l);
            let k = LegJoint::from_foot_vector(&j.foot_vector());
            assert!((k.angles() - j.angles()).norm() < 1e-12, "{k:?}");
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let j = LegJoint::new(0.4, -0.3, 0.22);
        let jac = j.jacobian(j.length, true);
        let h = 1e-7;
        for c in 0..3 {
            let mut p = j.angles();
            let mut m = j.angles();
            p[c] += h;
            m[c] -= h;
            let fp = LegJoint::new(p.x, p.y, p.z).foot_vector();
            let fm = LegJoint::new(m.x, m.y, m.z).foot_vector();
            let col = (fp - fm) / (2.0 * h);
            assert!((col - jac.column(c)).norm() < 1e-8);
        }
    }

    #[test]
    fn euler_rate_map_matches_rotation_derivative() {
        // ω_body from Rᵀ Ṙ must equal H θ̇.
        let th = Vec3::new(0.2, -0.4, 1.1);
        let rates = Vec3::new(0.3, -0.5, 0.7);
        let h = 1e-6;
        let rdot = (rotation(&(th + rates * h)) - rotation(&(th - rates * h))) / (2.0 * h);
        let w = rotation(&th).transpose() * rdot;
        let omega = Vec3::new(w[(2, 1)], w[(0, 2)], w[(1, 0)]);
        assert!((omega - euler_rate_map(&th) * rates).norm() < 1e-8);
        let hdot = (euler_rate_map(&(th + rates * h)) - euler_rate_map(&(th - rates * h))) / (2.0 * h);
        assert!((hdot - euler_rate_map_dot(&th, &rates)).norm() < 1e-8);
    }

    #[test]
    fn thrust_axis_is_vertical_in_aerial_pose() {
        let left = LegJoint::new(FRAC_PI_2, 0.0, 0.2);
        let right = LegJoint::new(-FRAC_PI_2, 0.0, 0.2);
        assert!((left.thrust_axis(1.0) - Vec3::z()).norm() < 1e-15);
        assert!((right.thrust_axis(-1.0) - Vec3::z()).norm() < 1e-15);
    }
}
