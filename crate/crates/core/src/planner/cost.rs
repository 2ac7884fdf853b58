use serde::{Deserialize, Serialize};

use crate::error::PlannerError;
use crate::geometry::Vec3;
use crate::rom::GRAVITY;

/// Energy constants used to price roadmap edges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    /// Walking energy per metre, J/m.
    pub c_walk_per_m: f64,
    /// Hover power, W.
    #[serde(rename = "P_f")]
    pub p_f: f64,
    /// Forward flight speed, m/s.
    pub v_f: f64,
    /// Energy of one walk/fly transformation, J.
    #[serde(rename = "C_t")]
    pub c_t: f64,
    #[serde(rename = "m")]
    pub mass: f64,
    #[serde(rename = "g")]
    pub gravity: f64,
}

impl CostModel {
    pub fn new(c_walk_per_m: f64, p_f: f64, v_f: f64, c_t: f64, mass: f64, gravity: f64) -> Result<Self, PlannerError> {
        let m = Self { c_walk_per_m, p_f, v_f, c_t, mass, gravity };
        m.validate()?;
        Ok(m)
    }

    /// Uncalibrated defaults; the CLI replaces `c_walk_per_m` and `C_t` with
    /// simulated values.
    pub fn nominal() -> Self {
        Self { c_walk_per_m: 50.0, p_f: 400.0, v_f: 2.0, c_t: 100.0, mass: 5.0, gravity: GRAVITY }
    }

    /// Energy per metre of flight, `P_f / v_f`.
    pub fn fly_rate(&self) -> f64 {
        self.p_f / self.v_f
    }

    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }

    /// Largest walking rate for which the heuristic stays consistent on
    /// climbing or descending flight edges.
    pub fn max_walk_rate(&self) -> f64 {
        let (a, b) = (self.fly_rate(), self.weight());
        (a * a - b * b).max(0.0).sqrt()
    }

    pub fn validate(&self) -> Result<(), PlannerError> {
        let positive = [self.c_walk_per_m, self.p_f, self.v_f, self.mass, self.gravity];
        if !positive.iter().all(|v| v.is_finite() && *v > 0.0) || !(self.c_t.is_finite() && self.c_t >= 0.0) {
            return Err(PlannerError::InvalidCostModel(format!("non-positive constant in {self:?}")));
        }
        if self.fly_rate() <= self.weight() {
            return Err(PlannerError::InvalidCostModel(format!(
                "P_f/v_f = {} must exceed m·g = {}",
                self.fly_rate(),
                self.weight()
            )));
        }
        if self.c_walk_per_m > self.max_walk_rate() {
            return Err(PlannerError::InvalidCostModel(format!(
                "c_walk_per_m = {} exceeds sqrt((P_f/v_f)² − (m·g)²) = {}",
                self.c_walk_per_m,
                self.max_walk_rate()
            )));
        }
        Ok(())
    }
}

pub fn walk_edge_cost(d: f64, model: &CostModel) -> f64 {
    model.c_walk_per_m * d
}

/// `max(0, P_f·d/v_f + m·g·(z2 − z1))`.
pub fn fly_edge_cost(d: f64, z1: f64, z2: f64, model: &CostModel) -> f64 {
    (model.fly_rate() * d + model.weight() * (z2 - z1)).max(0.0)
}

pub fn transition_cost(model: &CostModel) -> f64 {
    model.c_t
}

/// Cheapest conceivable vertical flight over `dz = z_goal − z`.
pub fn vertical_cost(dz: f64, model: &CostModel) -> f64 {
    (model.fly_rate() * dz.abs() + model.weight() * dz).max(0.0)
}

/// Lower bound on the remaining energy from `n` to `goal`: the larger of a
/// flat walk over the horizontal distance and a straight vertical flight.
pub fn heuristic(n: &Vec3, goal: &Vec3, model: &CostModel) -> f64 {
    let walk = model.c_walk_per_m * (goal - n).xy().norm();
    walk.max(vertical_cost(goal.z - n.z, model))
}
