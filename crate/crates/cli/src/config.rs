//! Scenario files and run configuration.

use std::path::Path;

use mmloco_core::planner::{CostModel, Discretization, PrmConfig};
use mmloco_core::rom::{GroundModel, RobotParams};
use mmloco_core::sim::SimParams;
use mmloco_core::Scenario;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Roadmap settings. The seed may be overridden on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "N_w")]
    pub n_walk: usize,
    #[serde(rename = "N_f")]
    pub n_fly: usize,
    pub seed: u64,
    pub grid_spacing: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        let p = PrmConfig::default();
        Self { radius: p.radius, n_walk: p.n_walk, n_fly: p.n_fly, seed: p.seed, grid_spacing: 0.25 }
    }
}

impl PlannerConfig {
    pub fn prm(&self) -> Discretization {
        Discretization::Prm(PrmConfig { radius: self.radius, n_walk: self.n_walk, n_fly: self.n_fly, seed: self.seed })
    }
}

/// Scenario plus optional planner, cost-model and simulation overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(flatten)]
    pub scenario: Scenario,
    #[serde(default)]
    pub planner: PlannerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_model: Option<CostModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robot: Option<RobotParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground: Option<GroundModel>,
}

impl ScenarioFile {
    pub fn new(scenario: Scenario) -> Self {
        Self { scenario, planner: PlannerConfig::default(), cost_model: None, sim: None, robot: None, ground: None }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let f: ScenarioFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("scenario: {e}")))?;
        f.scenario.validate()?;
        f.robot().validate().map_err(|e| CliError::Input(e.to_string()))?;
        f.ground().validate().map_err(|e| CliError::Input(e.to_string()))?;
        f.sim().validate().map_err(|e| CliError::Input(e.to_string()))?;
        if let Some(m) = &f.cost_model {
            m.validate()?;
        }
        Ok(f)
    }

    /// A path to a scenario file, or the name of a bundled scenario.
    pub fn load(name: &str) -> Result<Self, CliError> {
        let path = Path::new(name);
        if path.is_file() {
            return Self::from_json(&std::fs::read_to_string(path)?);
        }
        match Scenario::bundled(name) {
            Some(s) => Ok(Self::new(s)),
            None => Err(CliError::Input(format!("no scenario file or bundled scenario named {name:?}"))),
        }
    }

    pub fn robot(&self) -> RobotParams {
        self.robot.clone().unwrap_or_default()
    }

    pub fn ground(&self) -> GroundModel {
        self.ground.unwrap_or_default()
    }

    pub fn sim(&self) -> SimParams {
        self.sim.unwrap_or_default()
    }
}

#[derive(Serialize)]
struct HashedParams<'a> {
    scenario: &'a Scenario,
    planner: &'a PlannerConfig,
    cost_model: &'a CostModel,
    sim: &'a SimParams,
    robot: &'a RobotParams,
    ground: &'a GroundModel,
    hi_fi_edges: bool,
    grid: Option<f64>,
}

/// SHA-256 over the canonical JSON of every input that affects a run.
#[allow(clippy::too_many_arguments)]
pub fn param_hash(
    scenario: &Scenario,
    planner: &PlannerConfig,
    cost_model: &CostModel,
    sim: &SimParams,
    robot: &RobotParams,
    ground: &GroundModel,
    hi_fi_edges: bool,
    grid: Option<f64>,
) -> String {
    let p = HashedParams { scenario, planner, cost_model, sim, robot, ground, hi_fi_edges, grid };
    let bytes = serde_json::to_vec(&p).expect("parameters serialise");
    hex::encode(Sha256::digest(bytes))
}
