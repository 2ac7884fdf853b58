//! Multi-modal roadmaps, edge energy costs and A* search.

pub mod cost;
pub mod graph;
pub mod pipeline;
pub mod search;

pub use cost::{fly_edge_cost, heuristic, transition_cost, vertical_cost, walk_edge_cost, CostModel};
pub use graph::{
    classify_edge, EdgeCosts, EdgeExport, EdgeKind, ModeTag, PrmConfig, RoadmapEdge, RoadmapExport, RoadmapGraph,
    RoadmapNode, TRANSITION_RADIUS,
};
pub use pipeline::{plan_mission, plan_on_graph, Discretization, PlanOutcome};
pub use search::{astar, astar_filtered, flight_only_cost, GraphPath, MissionPlan, PlanSegment, Waypoint};
