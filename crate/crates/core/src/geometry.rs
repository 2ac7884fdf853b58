//! World model: axis-aligned box obstacles over a flat ground plane.
//!
//! Obstacles are closed boxes; free space is everything outside their open
//! interiors, so touching a face counts as free. The robot is checked as a
//! bounding sphere of radius `robot_radius` resting on the query point: a
//! roadmap node is the lowest point of that sphere, so a walking node sits
//! exactly on its supporting surface.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

pub type Vec3 = nalgebra::Vector3<f64>;

pub const DEFAULT_ROBOT_RADIUS: f64 = 0.5;
pub const DEFAULT_EPS_AIR: f64 = 0.25;
/// Inset from the edge of a walkable top inside which the feet have support.
pub const DEFAULT_SUPPORT_MARGIN: f64 = 0.3;
/// Attempts allowed per requested node before sampling gives up.
pub const SAMPLING_BUDGET_FACTOR: usize = 100;

const SUPPORT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Box3 {
    pub min: Vec3,
    pub max: Vec3,
    #[serde(default)]
    pub walkable_top: bool,
}

impl Box3 {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max, walkable_top: false }
    }

    pub fn walkable(min: Vec3, max: Vec3) -> Self {
        Self { min, max, walkable_top: true }
    }

    pub fn is_valid(&self) -> bool {
        (0..3).all(|i| self.min[i].is_finite() && self.max[i].is_finite() && self.min[i] <= self.max[i])
    }

    pub fn contains_closed(&self, p: &Vec3) -> bool {
        (0..3).all(|i| self.min[i] <= p[i] && p[i] <= self.max[i])
    }

    pub fn contains_open(&self, p: &Vec3) -> bool {
        (0..3).all(|i| self.min[i] < p[i] && p[i] < self.max[i])
    }

    pub fn footprint_contains(&self, x: f64, y: f64) -> bool {
        self.min.x <= x && x <= self.max.x && self.min.y <= y && y <= self.max.y
    }

    pub fn intersects_closed(&self, other: &Box3) -> bool {
        (0..3).all(|i| self.min[i] <= other.max[i] && other.min[i] <= self.max[i])
    }

    /// Box grown by `r` on every face.
    pub fn inflated(&self, r: f64) -> Box3 {
        let d = Vec3::repeat(r);
        Box3 { min: self.min - d, max: self.max + d, walkable_top: self.walkable_top }
    }

    /// Exact slab test: does the closed segment `ab` meet the open interior?
    pub fn segment_hits_interior(&self, a: &Vec3, b: &Vec3) -> bool {
        let d = b - a;
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for i in 0..3 {
            if d[i] == 0.0 {
                if !(self.min[i] < a[i] && a[i] < self.max[i]) {
                    return false;
                }
            } else {
                let t0 = (self.min[i] - a[i]) / d[i];
                let t1 = (self.max[i] - a[i]) / d[i];
                let (t0, t1) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
                lo = lo.max(t0);
                hi = hi.min(t1);
            }
        }
        // [0, 1] ∩ (lo, hi) is non-empty
        lo < hi && lo < 1.0 && hi > 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentMap {
    pub bounds: Box3,
    pub z_gnd: f64,
    #[serde(default)]
    pub obstacles: Vec<Box3>,
    #[serde(default = "default_robot_radius")]
    pub robot_radius: f64,
    #[serde(default = "default_eps_air")]
    pub eps_air: f64,
    #[serde(default = "default_support_margin")]
    pub support_margin: f64,
}

fn default_robot_radius() -> f64 {
    DEFAULT_ROBOT_RADIUS
}

fn default_eps_air() -> f64 {
    DEFAULT_EPS_AIR
}

fn default_support_margin() -> f64 {
    DEFAULT_SUPPORT_MARGIN
}

impl EnvironmentMap {
    pub fn new(bounds: Box3, z_gnd: f64, obstacles: Vec<Box3>) -> Result<Self, GeometryError> {
        let env = Self {
            bounds,
            z_gnd,
            obstacles,
            robot_radius: DEFAULT_ROBOT_RADIUS,
            eps_air: DEFAULT_EPS_AIR,
            support_margin: DEFAULT_SUPPORT_MARGIN,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn with_robot_radius(mut self, r: f64) -> Self {
        self.robot_radius = r;
        self
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |m: String| Err(GeometryError::InvalidEnvironment(m));
        if !self.bounds.is_valid() {
            return bad("bounds are not a valid box".into());
        }
        if !(self.bounds.min.z <= self.z_gnd && self.z_gnd <= self.bounds.max.z) {
            return bad(format!("z_gnd = {} outside bounds", self.z_gnd));
        }
        if !(self.robot_radius >= 0.0 && self.robot_radius.is_finite()) {
            return bad("robot_radius must be finite and non-negative".into());
        }
        if !(self.eps_air > 0.0 && self.eps_air.is_finite()) {
            return bad("eps_air must be positive".into());
        }
        if !(self.support_margin >= 0.0 && self.support_margin.is_finite()) {
            return bad("support_margin must be finite and non-negative".into());
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if !o.is_valid() {
                return bad(format!("obstacle {i} has min > max or non-finite corners"));
            }
            if !o.intersects_closed(&self.bounds) {
                return bad(format!("obstacle {i} does not intersect the bounds"));
            }
        }
        Ok(())
    }

    /// Inside the bounds and outside every obstacle interior.
    pub fn is_point_free(&self, p: &Vec3) -> bool {
        self.bounds.contains_closed(p) && !self.obstacles.iter().any(|o| o.contains_open(p))
    }

    /// The closed segment `ab` avoids every obstacle interior.
    pub fn segment_clear(&self, a: &Vec3, b: &Vec3) -> bool {
        !self.obstacles.iter().any(|o| o.segment_hits_interior(a, b))
    }

    fn sphere_center(&self, node: &Vec3) -> Vec3 {
        node + Vec3::new(0.0, 0.0, self.robot_radius)
    }

    /// Robot sphere resting on `node` is collision free. Obstacles are
    /// inflated by the radius (a box-shaped, conservative Minkowski sum).
    pub fn robot_free(&self, node: &Vec3) -> bool {
        if !self.bounds.contains_closed(node) {
            return false;
        }
        let c = self.sphere_center(node);
        let r = self.robot_radius;
        !self.obstacles.iter().any(|o| o.inflated(r).contains_open(&c))
    }

    /// Robot sphere swept between two nodes stays collision free.
    pub fn robot_segment_clear(&self, a: &Vec3, b: &Vec3) -> bool {
        let (ca, cb) = (self.sphere_center(a), self.sphere_center(b));
        let r = self.robot_radius;
        !self.obstacles.iter().any(|o| o.inflated(r).segment_hits_interior(&ca, &cb))
    }

    pub fn footprint_contains(&self, x: f64, y: f64) -> bool {
        self.bounds.footprint_contains(x, y)
    }

    /// Highest surface the robot could stand on at `(x, y)`: the ground or
    /// the top of a walkable obstacle. `None` when that spot is blocked or
    /// within `support_margin` of the edge of a raised top.
    pub fn walkable_height(&self, x: f64, y: f64) -> Option<f64> {
        if !self.footprint_contains(x, y) {
            return None;
        }
        let top = self
            .obstacles
            .iter()
            .filter(|o| o.walkable_top && o.footprint_contains(x, y))
            .map(|o| o.max.z)
            .fold(self.z_gnd, f64::max);
        let m = self.support_margin;
        let supported = top <= self.z_gnd
            || self.obstacles.iter().any(|o| {
                o.walkable_top
                    && o.max.z == top
                    && o.min.x + m <= x
                    && x <= o.max.x - m
                    && o.min.y + m <= y
                    && y <= o.max.y - m
            });
        (supported && self.robot_free(&Vec3::new(x, y, top))).then_some(top)
    }

    /// Highest walkable surface at `(x, y)` not above `z`.
    pub fn walkable_surface_below(&self, x: f64, y: f64, z: f64) -> f64 {
        self.obstacles
            .iter()
            .filter(|o| o.walkable_top && o.footprint_contains(x, y) && o.max.z <= z + SUPPORT_TOL)
            .map(|o| o.max.z)
            .fold(self.z_gnd, f64::max)
    }

    /// Contact surface for a foot at `p`: the highest top (walkable or not)
    /// under the point, allowing `tol` of penetration.
    pub fn contact_surface(&self, p: &Vec3, tol: f64) -> f64 {
        self.obstacles
            .iter()
            .filter(|o| o.footprint_contains(p.x, p.y) && o.max.z <= p.z + tol)
            .map(|o| o.max.z)
            .fold(self.z_gnd, f64::max)
    }

    /// Body centre inside a box grown horizontally by `r`; used to detect a
    /// robot walking or flying into an obstacle side.
    pub fn body_collides(&self, p: &Vec3, r: f64) -> bool {
        self.obstacles.iter().any(|o| {
            o.min.x - r < p.x
                && p.x < o.max.x + r
                && o.min.y - r < p.y
                && p.y < o.max.y + r
                && o.min.z < p.z
                && p.z < o.max.z
        })
    }

    /// Walking support holds along the whole segment: every probe point
    /// (spaced at most `step` apart) stands on a surface at height `z`.
    pub fn walk_supported(&self, a: &Vec3, b: &Vec3, step: f64) -> bool {
        let n = ((b - a).xy().norm() / step).ceil().max(1.0) as usize;
        (0..=n).all(|k| {
            let p = a + (b - a) * (k as f64 / n as f64);
            matches!(self.walkable_height(p.x, p.y), Some(h) if (h - a.z).abs() <= SUPPORT_TOL)
        })
    }

    fn sample_xy<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let b = &self.bounds;
        let x = b.min.x + rng.gen::<f64>() * (b.max.x - b.min.x);
        let y = b.min.y + rng.gen::<f64>() * (b.max.y - b.min.y);
        (x, y)
    }

    /// Uniform walking node over the footprint, on its supporting surface.
    pub fn sample_walking_node<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        max_attempts: usize,
    ) -> Result<Vec3, GeometryError> {
        for _ in 0..max_attempts {
            let (x, y) = self.sample_xy(rng);
            if let Some(z) = self.walkable_height(x, y) {
                return Ok(Vec3::new(x, y, z));
            }
        }
        Err(GeometryError::SamplingBudget { mode: "walking", attempts: max_attempts })
    }

    /// Uniform flying node with `z` in `(z_gnd + eps_air, max.z]`, clear of
    /// the local walkable surface by more than `eps_air`.
    pub fn sample_flying_node<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        max_attempts: usize,
    ) -> Result<Vec3, GeometryError> {
        let z_lo = self.z_gnd + self.eps_air;
        let z_hi = self.bounds.max.z;
        if z_hi > z_lo {
            for _ in 0..max_attempts {
                let (x, y) = self.sample_xy(rng);
                let z = z_hi - rng.gen::<f64>() * (z_hi - z_lo);
                let p = Vec3::new(x, y, z);
                if self.is_flying_position(&p) {
                    return Ok(p);
                }
            }
        }
        Err(GeometryError::SamplingBudget { mode: "flying", attempts: max_attempts })
    }

    /// Valid flying-node position: collision free and above the local
    /// walkable surface by more than `eps_air`.
    pub fn is_flying_position(&self, p: &Vec3) -> bool {
        p.z > self.walkable_surface_below(p.x, p.y, p.z) + self.eps_air && self.robot_free(p)
    }
}
