//! Machine-readable run reports.

use std::collections::BTreeMap;
use std::path::Path;

use mmloco_core::planner::{CostModel, EdgeKind, MissionPlan, ModeTag, RoadmapGraph};
use mmloco_core::sim::{Calibration, MissionResult};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoadmapStats {
    pub discretization: String,
    pub nodes: usize,
    pub edges: usize,
    pub walking_nodes: usize,
    pub flying_nodes: usize,
    pub walk_edges: usize,
    pub fly_edges: usize,
    pub transition_edges: usize,
}

impl RoadmapStats {
    pub fn of(graph: &RoadmapGraph, discretization: String) -> Self {
        Self {
            discretization,
            nodes: graph.len(),
            edges: graph.edges.len(),
            walking_nodes: graph.count_mode(ModeTag::Walking),
            flying_nodes: graph.count_mode(ModeTag::Flying),
            walk_edges: graph.count_kind(EdgeKind::Walk),
            fly_edges: graph.count_kind(EdgeKind::Fly),
            transition_edges: graph.count_kind(EdgeKind::Transition),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    #[serde(rename = "total_energy_J")]
    pub total_energy: f64,
    #[serde(rename = "walk_energy_J")]
    pub walk_energy: f64,
    #[serde(rename = "fly_energy_J")]
    pub fly_energy: f64,
    #[serde(rename = "transition_energy_J")]
    pub transition_energy: f64,
    pub n_waypoints: usize,
    pub n_transitions: usize,
    /// Cheapest all-flight route on the same roadmap.
    #[serde(rename = "flight_only_J")]
    pub flight_only: Option<f64>,
    /// Multi-modal cost over flight-only cost.
    pub saving_ratio: Option<f64>,
}

impl PlanSummary {
    pub fn of(plan: &MissionPlan, flight_only: Option<f64>) -> Self {
        Self {
            total_energy: plan.total_energy,
            walk_energy: plan.energy_of(EdgeKind::Walk),
            fly_energy: plan.energy_of(EdgeKind::Fly),
            transition_energy: plan.energy_of(EdgeKind::Transition),
            n_waypoints: plan.waypoints.len(),
            n_transitions: plan.n_transitions,
            flight_only,
            saving_ratio: flight_only.filter(|f| *f > 0.0).map(|f| plan.total_energy / f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationResult {
    /// Sampled roadmap before the endpoints are inserted.
    pub roadmap: RoadmapStats,
    pub plan: Option<PlanSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub prm: DiscretizationResult,
    pub grid: DiscretizationResult,
    /// PRM over grid.
    pub node_ratio: f64,
    pub edge_ratio: f64,
    pub cost_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionSummary {
    pub result: MissionResult,
    pub n_transformations: usize,
    pub final_error_m: Option<f64>,
    #[serde(rename = "planned_total_J")]
    pub planned_total: f64,
    #[serde(rename = "realized_total_J")]
    pub realized_total: Option<f64>,
    /// Realized over planned energy.
    pub energy_ratio: Option<f64>,
    pub duration_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModelSource {
    pub source: String,
    pub model: CostModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub scenario: Option<String>,
    pub seed: u64,
    pub param_hash: String,
    pub rng: String,
    pub cost_model: CostModelSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roadmap: Option<RoadmapStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mission: Option<MissionSummary>,
}

/// Output of `calibrate`; also accepted by `--cost-model`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFile {
    pub cost_model: CostModel,
    pub calibration: Calibration,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub param_hash: String,
    pub dt_s: f64,
    pub walk_window_m: f64,
    pub walk_duration_s: f64,
    pub transform_duration_s: f64,
}

/// Wall-clock times in seconds, kept apart from the deterministic outputs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing(pub BTreeMap<String, f64>);

impl Timing {
    pub fn time<T>(&mut self, key: &str, f: impl FnOnce() -> T) -> T {
        let t0 = std::time::Instant::now();
        let out = f();
        *self.0.entry(key.to_string()).or_default() += t0.elapsed().as_secs_f64();
        out
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
