//! Compliant ground contact with Stribeck friction.

use crate::geometry::Vec3;
use crate::rom::params::GroundModel;

/// `sgn` with `sgn(0) = 0`.
fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Friction coefficient blend `mu_c + (mu_s - mu_c) exp(-v²/v_s²)`.
pub fn stribeck_coefficient(v: f64, model: &GroundModel) -> f64 {
    model.mu_c + (model.mu_s - model.mu_c) * (-(v * v) / (model.v_s * model.v_s)).exp()
}

/// Ground reaction force on a foot (inertial frame) over a flat surface at
/// height `surface_z`. Zero when the foot is not below the surface; the
/// normal force never pulls.
pub fn ground_reaction(foot_pos: &Vec3, foot_vel: &Vec3, model: &GroundModel, surface_z: f64) -> Vec3 {
    let depth = foot_pos.z - surface_z;
    if depth >= 0.0 {
        return Vec3::zeros();
    }
    let fz = (-model.k_gp * depth - model.k_gd * foot_vel.z).max(0.0);
    let tangential = |v: f64| -stribeck_coefficient(v, model) * fz * sgn(v) - model.mu_v * v;
    Vec3::new(tangential(foot_vel.x), tangential(foot_vel.y), fz)
}
