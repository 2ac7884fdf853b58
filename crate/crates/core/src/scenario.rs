//! Scenario files: an environment plus start and goal positions.

use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::error::GeometryError;
use crate::geometry::{Box3, EnvironmentMap, Vec3};
use crate::planner::RoadmapGraph;
use crate::rng::{self, streams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub env: EnvironmentMap,
    pub start: Vec3,
    pub goal: Vec3,
}

/// Names accepted by [`Scenario::bundled`].
pub const BUNDLED: [&str; 3] = ["env_a", "env_b", "env_c"];

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| GeometryError::InvalidEnvironment(format!("scenario parse error: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    /// Environment valid; start and goal are usable roadmap endpoints.
    pub fn validate(&self) -> Result<(), GeometryError> {
        self.env.validate()?;
        for (what, p) in [("start", &self.start), ("goal", &self.goal)] {
            if RoadmapGraph::mode_at(&self.env, p).is_none() {
                return Err(GeometryError::InvalidEnvironment(format!(
                    "{what} {p:?} is neither on a walkable surface nor a free flying position"
                )));
            }
        }
        Ok(())
    }

    pub fn bundled(name: &str) -> Option<Scenario> {
        let text = match name {
            "env_a" => include_str!("../scenarios/env_a.json"),
            "env_b" => include_str!("../scenarios/env_b.json"),
            "env_c" => include_str!("../scenarios/env_c.json"),
            _ => return None,
        };
        Some(Self::from_json(text).expect("bundled scenarios are valid"))
    }

    /// Seeded 20×20×6 m scene: a few solid pillars, one walkable block,
    /// start on the ground and goal on the block.
    pub fn random(seed: u64) -> Scenario {
        let mut r = rng::stream(seed, streams::SCENARIO);
        let bounds = Box3::new(Vec3::zeros(), Vec3::new(20.0, 20.0, 6.0));
        let lo = Vec3::new(12.0 + r.gen::<f64>() * 3.0, 4.0 + r.gen::<f64>() * 8.0, 0.0);
        let block = Box3::walkable(lo, lo + Vec3::new(4.0, 4.0, 0.5 + r.gen::<f64>() * 2.0));
        let start = Vec3::new(2.0, 2.0 + r.gen::<f64>() * 16.0, 0.0);
        let goal = Vec3::new(lo.x + 2.0, lo.y + 2.0, block.max.z);
        let mut obstacles = vec![block];
        let n = r.gen_range(2..6);
        while obstacles.len() <= n {
            let c = Vec3::new(4.0 + r.gen::<f64>() * 7.0, r.gen::<f64>() * 20.0, 0.0);
            let h = Vec3::new(0.3 + r.gen::<f64>() * 0.7, 0.5 + r.gen::<f64>() * 2.0, 0.0);
            let pillar = Box3::new(c - h, c + h + Vec3::new(0.0, 0.0, 1.0 + r.gen::<f64>() * 5.0));
            if (pillar.inflated(1.0)).footprint_contains(start.x, start.y) {
                continue;
            }
            obstacles.push(Box3::new(pillar.min.sup(&bounds.min), pillar.max.inf(&bounds.max)));
        }
        let env = EnvironmentMap::new(bounds, 0.0, obstacles).expect("random scene is valid");
        Scenario { name: Some(format!("random_{seed}")), env, start, goal }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_load() {
        for name in BUNDLED {
            let s = Scenario::bundled(name).unwrap();
            assert_eq!(s.name.as_deref(), Some(name));
        }
        assert!(Scenario::bundled("nope").is_none());
    }

    #[test]
    fn json_round_trip() {
        let s = Scenario::bundled("env_a").unwrap();
        assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn minimal_schema_and_bad_endpoints() {
        let text = r#"{"bounds": {"min": [0, 0, 0], "max": [10, 10, 5]}, "z_gnd": 0,
            "obstacles": [{"min": [4, 4, 0], "max": [6, 6, 2], "walkable_top": true}],
            "start": [1, 1, 0], "goal": [5, 5, 2]}"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.env.obstacles.len(), 1);
        assert_eq!(s.env.robot_radius, crate::geometry::DEFAULT_ROBOT_RADIUS);
        let floating = text.replace("\"start\": [1, 1, 0]", "\"start\": [1, 1, 0.1]");
        assert!(Scenario::from_json(&floating).is_err());
        assert!(Scenario::from_json("{").is_err());
    }

    #[test]
    fn random_scenarios_are_valid_and_seeded() {
        for seed in 0..50 {
            let s = Scenario::random(seed);
            s.validate().unwrap();
            assert_eq!(s, Scenario::random(seed));
        }
        assert_ne!(Scenario::random(1), Scenario::random(2));
    }
}
