//! Roadmap → endpoints → costs → search.

use crate::error::PlannerError;
use crate::geometry::{EnvironmentMap, Vec3};

use super::cost::CostModel;
use super::graph::{EdgeCosts, EdgeKind, PrmConfig, RoadmapGraph};
use crate::planner::ModeTag;
use super::search::{astar, flight_only_cost, GraphPath, MissionPlan};

/// How the roadmap is discretised.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Discretization {
    Prm(PrmConfig),
    /// Uniform lattice with the given spacing, m.
    Grid(f64),
}

impl Discretization {
    pub fn build(&self, env: &EnvironmentMap) -> Result<RoadmapGraph, PlannerError> {
        match self {
            Discretization::Prm(c) => RoadmapGraph::build_mm_prm(env, c),
            Discretization::Grid(s) => RoadmapGraph::build_uniform_grid(env, *s),
        }
    }

    /// Radius used to connect the start and goal.
    pub fn endpoint_radius(&self) -> f64 {
        match self {
            Discretization::Prm(c) => c.radius,
            Discretization::Grid(s) => s * 3f64.sqrt() * (1.0 + 1e-9),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanOutcome {
    pub graph: RoadmapGraph,
    pub costs: EdgeCosts,
    pub start: usize,
    pub goal: usize,
    pub path: GraphPath,
    pub plan: MissionPlan,
    /// Cheapest all-flight route on the same graph, if any.
    pub flight_only: Option<f64>,
}

/// Model whose walking rate never exceeds the cheapest walk edge, which
/// keeps the heuristic admissible for simulated edge costs.
fn heuristic_model(graph: &RoadmapGraph, costs: &EdgeCosts, model: &CostModel) -> CostModel {
    let min_rate = graph
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == EdgeKind::Walk && e.length > 0.0)
        .map(|(i, e)| costs.forward[i].min(costs.reverse[i]) / e.length)
        .fold(model.c_walk_per_m, f64::min);
    CostModel { c_walk_per_m: min_rate.max(0.0), ..*model }
}

/// Lowest free flying position straight above `p`.
fn hover_point(env: &EnvironmentMap, p: &Vec3) -> Option<Vec3> {
    let mut q = *p + Vec3::new(0.0, 0.0, env.eps_air + 1e-3);
    while q.z < env.bounds.max.z {
        if env.is_flying_position(&q) {
            return Some(q);
        }
        q.z += 0.05;
    }
    None
}

/// Insert the endpoints into `graph` and search it.
pub fn plan_on_graph(
    mut graph: RoadmapGraph,
    env: &EnvironmentMap,
    start: Vec3,
    goal: Vec3,
    endpoint_radius: f64,
    model: &CostModel,
    walk_rollout: Option<&(dyn Fn(f64) -> f64 + Sync)>,
) -> Result<PlanOutcome, PlannerError> {
    model.validate()?;
    let s = graph.insert_endpoint(env, start, endpoint_radius)?;
    let g = if goal == start { s } else { graph.insert_endpoint(env, goal, endpoint_radius)? };
    // hover nodes above walking endpoints keep the all-flight route available
    let mut ends = vec![s, g];
    ends.dedup();
    for id in ends {
        let node = graph.nodes[id];
        if node.mode == ModeTag::Walking {
            if let Some(q) = hover_point(env, &node.pos) {
                graph.insert_endpoint(env, q, endpoint_radius)?;
            }
        }
    }
    let costs = match walk_rollout {
        Some(f) => EdgeCosts::high_fidelity(&graph, model, f),
        None => EdgeCosts::from_model(&graph, model),
    };
    let h_model = heuristic_model(&graph, &costs, model);
    let path = astar(&graph, &costs, &h_model, s, g)?;
    let plan = MissionPlan::from_path(&graph, &costs, &path);
    let flight_only = flight_only_cost(&graph, &costs, &h_model, s, g).ok();
    Ok(PlanOutcome { graph, costs, start: s, goal: g, path, plan, flight_only })
}

/// Build the roadmap and plan from `start` to `goal`.
pub fn plan_mission(
    env: &EnvironmentMap,
    start: Vec3,
    goal: Vec3,
    discretization: &Discretization,
    model: &CostModel,
    walk_rollout: Option<&(dyn Fn(f64) -> f64 + Sync)>,
) -> Result<PlanOutcome, PlannerError> {
    let graph = discretization.build(env)?;
    plan_on_graph(graph, env, start, goal, discretization.endpoint_radius(), model, walk_rollout)
}
