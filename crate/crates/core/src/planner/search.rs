use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::PlannerError;
use crate::geometry::Vec3;

use super::cost::{heuristic, CostModel};
use super::graph::{EdgeCosts, EdgeKind, ModeTag, RoadmapEdge, RoadmapGraph};

/// Node and edge sequence of a search result with its accumulated cost.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphPath {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
    pub cost: f64,
}

#[derive(Clone, Copy, Debug)]
struct Open {
    f: f64,
    h: f64,
    id: usize,
}

impl PartialEq for Open {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Open {
    // reversed: BinaryHeap pops the smallest (f, h, id)
    fn cmp(&self, o: &Self) -> Ordering {
        o.f.total_cmp(&self.f).then(o.h.total_cmp(&self.h)).then(o.id.cmp(&self.id))
    }
}

pub fn astar(
    graph: &RoadmapGraph,
    costs: &EdgeCosts,
    model: &CostModel,
    start: usize,
    goal: usize,
) -> Result<GraphPath, PlannerError> {
    astar_filtered(graph, costs, model, start, goal, |_, _| true)
}

/// A* over the edges accepted by `allow(edge index, edge)`.
pub fn astar_filtered<F>(
    graph: &RoadmapGraph,
    costs: &EdgeCosts,
    model: &CostModel,
    start: usize,
    goal: usize,
    allow: F,
) -> Result<GraphPath, PlannerError>
where
    F: Fn(usize, &RoadmapEdge) -> bool,
{
    graph.node(start)?;
    let goal_pos = graph.node(goal)?.pos;
    let n = graph.len();
    let h = |i: usize| heuristic(&graph.nodes[i].pos, &goal_pos, model);
    let mut g = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut open = BinaryHeap::new();
    g[start] = 0.0;
    open.push(Open { f: h(start), h: h(start), id: start });
    while let Some(Open { f, h: hn, id }) = open.pop() {
        if f > g[id] + hn {
            continue;
        }
        if id == goal {
            break;
        }
        for &(nb, e) in &graph.adjacency[id] {
            if !allow(e, &graph.edges[e]) {
                continue;
            }
            let cand = g[id] + costs.cost(graph, e, id);
            if cand < g[nb] {
                g[nb] = cand;
                parent[nb] = Some((id, e));
                let hv = h(nb);
                open.push(Open { f: cand + hv, h: hv, id: nb });
            }
        }
    }
    if !g[goal].is_finite() {
        return Err(PlannerError::Unreachable);
    }
    let mut nodes = vec![goal];
    let mut edges = Vec::new();
    let mut cur = goal;
    while let Some((p, e)) = parent[cur] {
        nodes.push(p);
        edges.push(e);
        cur = p;
    }
    nodes.reverse();
    edges.reverse();
    Ok(GraphPath { nodes, edges, cost: g[goal] })
}

/// Cheapest route that flies the whole way: fly edges plus transitions
/// touching the start or the goal.
pub fn flight_only_cost(
    graph: &RoadmapGraph,
    costs: &EdgeCosts,
    model: &CostModel,
    start: usize,
    goal: usize,
) -> Result<f64, PlannerError> {
    let path = astar_filtered(graph, costs, model, start, goal, |_, e| match e.kind {
        EdgeKind::Fly => true,
        EdgeKind::Transition => [start, goal].contains(&e.a) || [start, goal].contains(&e.b),
        EdgeKind::Walk => false,
    })?;
    Ok(path.cost)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub pos: Vec3,
    pub mode: ModeTag,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanSegment {
    pub kind: EdgeKind,
    /// Planned energy, J.
    pub energy: f64,
}

/// Waypoints with mode tags and the planned per-segment energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionPlan {
    pub waypoints: Vec<Waypoint>,
    pub segments: Vec<PlanSegment>,
    pub total_energy: f64,
    pub n_transitions: usize,
}

impl MissionPlan {
    pub fn from_path(graph: &RoadmapGraph, costs: &EdgeCosts, path: &GraphPath) -> Self {
        let waypoints = path.nodes.iter().map(|&i| Waypoint { pos: graph.nodes[i].pos, mode: graph.nodes[i].mode }).collect();
        let segments: Vec<PlanSegment> = path
            .edges
            .iter()
            .zip(&path.nodes)
            .map(|(&e, &from)| PlanSegment { kind: graph.edges[e].kind, energy: costs.cost(graph, e, from) })
            .collect();
        let total_energy = segments.iter().fold(0.0, |acc, s| acc + s.energy);
        let n_transitions = segments.iter().filter(|s| s.kind == EdgeKind::Transition).count();
        Self { waypoints, segments, total_energy, n_transitions }
    }

    pub fn validate(&self) -> Result<(), PlannerError> {
        if self.waypoints.is_empty() || self.segments.len() + 1 != self.waypoints.len() {
            return Err(PlannerError::InvalidConfig(format!(
                "{} waypoints for {} segments",
                self.waypoints.len(),
                self.segments.len()
            )));
        }
        for (s, w) in self.segments.iter().zip(self.waypoints.windows(2)) {
            let ok = match s.kind {
                EdgeKind::Walk => w[0].mode == ModeTag::Walking && w[1].mode == ModeTag::Walking,
                EdgeKind::Fly => w[0].mode == ModeTag::Flying && w[1].mode == ModeTag::Flying,
                EdgeKind::Transition => w[0].mode != w[1].mode,
            };
            if !ok {
                return Err(PlannerError::InvalidConfig(format!("segment {s:?} joins {:?} and {:?}", w[0].mode, w[1].mode)));
            }
        }
        Ok(())
    }

    pub fn energy_of(&self, kind: EdgeKind) -> f64 {
        self.segments.iter().filter(|s| s.kind == kind).map(|s| s.energy).sum()
    }
}
