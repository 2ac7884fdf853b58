use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::PlannerError;
use crate::geometry::{EnvironmentMap, Vec3, SAMPLING_BUDGET_FACTOR};
use crate::rng::{self, streams};

use super::cost::{fly_edge_cost, transition_cost, walk_edge_cost, CostModel};

/// Horizontal reach of a transition edge, m.
pub const TRANSITION_RADIUS: f64 = 1.0;
/// Probe spacing when checking walking support along an edge, m.
pub const SUPPORT_STEP: f64 = 0.25;
/// Uniform-grid node guard.
pub const MAX_GRID_NODES: usize = 1_000_000;
const LEVEL_TOL: f64 = 1e-9;
/// Length quantum for memoised per-edge walking rollouts, m.
pub const HIFI_QUANTUM: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeTag {
    Walking,
    Flying,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Walk,
    Fly,
    Transition,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoadmapNode {
    pub id: usize,
    pub pos: Vec3,
    pub mode: ModeTag,
}

/// Undirected edge; costs are priced per direction by [`EdgeCosts`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoadmapEdge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
    pub length: f64,
}

impl RoadmapEdge {
    pub fn other(&self, n: usize) -> usize {
        if n == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrmConfig {
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "N_w")]
    pub n_walk: usize,
    #[serde(rename = "N_f")]
    pub n_fly: usize,
    pub seed: u64,
}

impl Default for PrmConfig {
    fn default() -> Self {
        Self { radius: 4.0, n_walk: 300, n_fly: 300, seed: 0 }
    }
}

impl PrmConfig {
    pub fn validate(&self) -> Result<(), PlannerError> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(PlannerError::InvalidConfig(format!("R = {}", self.radius)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RoadmapGraph {
    pub nodes: Vec<RoadmapNode>,
    pub edges: Vec<RoadmapEdge>,
    /// `(neighbour, edge index)` per node, in edge insertion order.
    pub adjacency: Vec<Vec<(usize, usize)>>,
    /// Nodes produced by sampling or the lattice, before endpoint insertion.
    pub n_sampled: usize,
}

/// Edge classification shared by every graph builder.
pub fn classify_edge(env: &EnvironmentMap, a: &RoadmapNode, b: &RoadmapNode) -> Option<EdgeKind> {
    let kind = match (a.mode, b.mode) {
        (ModeTag::Walking, ModeTag::Walking) => {
            if (a.pos.z - b.pos.z).abs() > LEVEL_TOL || !env.walk_supported(&a.pos, &b.pos, SUPPORT_STEP) {
                return None;
            }
            EdgeKind::Walk
        }
        (ModeTag::Flying, ModeTag::Flying) => EdgeKind::Fly,
        _ => {
            if (a.pos - b.pos).xy().norm() >= TRANSITION_RADIUS {
                return None;
            }
            EdgeKind::Transition
        }
    };
    env.robot_segment_clear(&a.pos, &b.pos).then_some(kind)
}

impl RoadmapGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn count_mode(&self, mode: ModeTag) -> usize {
        self.nodes.iter().filter(|n| n.mode == mode).count()
    }

    pub fn count_kind(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn node(&self, id: usize) -> Result<&RoadmapNode, PlannerError> {
        self.nodes.get(id).ok_or(PlannerError::UnknownNode(id))
    }

    fn push_node(&mut self, pos: Vec3, mode: ModeTag) -> usize {
        let id = self.nodes.len();
        self.nodes.push(RoadmapNode { id, pos, mode });
        self.adjacency.push(Vec::new());
        id
    }

    fn push_edge(&mut self, a: usize, b: usize, kind: EdgeKind) {
        let length = (self.nodes[a].pos - self.nodes[b].pos).norm();
        let idx = self.edges.len();
        self.edges.push(RoadmapEdge { a, b, kind, length });
        self.adjacency[a].push((b, idx));
        self.adjacency[b].push((a, idx));
    }

    /// Add an edge between two existing nodes without geometric checks.
    pub fn add_edge(&mut self, a: usize, b: usize, kind: EdgeKind) -> Result<(), PlannerError> {
        self.node(a)?;
        self.node(b)?;
        self.push_edge(a, b, kind);
        Ok(())
    }

    /// Graph from explicit nodes, without edges.
    pub fn from_nodes(nodes: impl IntoIterator<Item = (Vec3, ModeTag)>) -> Self {
        let mut g = Self::default();
        for (p, m) in nodes {
            g.push_node(p, m);
        }
        g.n_sampled = g.nodes.len();
        g
    }

    /// Mode of a free-standing position: walking when it rests on the
    /// walkable surface, flying when it is a valid flying position.
    pub fn mode_at(env: &EnvironmentMap, pos: &Vec3) -> Option<ModeTag> {
        match env.walkable_height(pos.x, pos.y) {
            Some(h) if (h - pos.z).abs() <= 1e-6 => Some(ModeTag::Walking),
            _ if env.is_flying_position(pos) => Some(ModeTag::Flying),
            _ => None,
        }
    }

    /// Insert a start or goal position and connect it to every node within
    /// `radius` under the usual edge rules.
    pub fn insert_endpoint(&mut self, env: &EnvironmentMap, pos: Vec3, radius: f64) -> Result<usize, PlannerError> {
        let mode = Self::mode_at(env, &pos)
            .ok_or_else(|| PlannerError::InvalidConfig(format!("endpoint {pos:?} is neither walkable nor a free flying position")))?;
        let mut pos = pos;
        if mode == ModeTag::Walking {
            pos.z = env.walkable_height(pos.x, pos.y).unwrap_or(pos.z);
        }
        let id = self.push_node(pos, mode);
        let me = self.nodes[id];
        let found: Vec<(usize, EdgeKind)> = self.nodes[..id]
            .par_iter()
            .filter(|n| (n.pos - me.pos).norm() <= radius)
            .filter_map(|n| classify_edge(env, n, &me).map(|k| (n.id, k)))
            .collect();
        for (j, k) in found {
            self.push_edge(j, id, k);
        }
        Ok(id)
    }

    /// Multi-modal PRM: `N_w` walking then `N_f` flying samples from the
    /// roadmap stream, each connected to all prior nodes within `R`.
    pub fn build_mm_prm(env: &EnvironmentMap, config: &PrmConfig) -> Result<Self, PlannerError> {
        config.validate()?;
        env.validate()?;
        let mut rng = rng::stream(config.seed, streams::ROADMAP);
        let mut g = Self::default();
        let budget_w = SAMPLING_BUDGET_FACTOR * config.n_walk.max(1);
        for _ in 0..config.n_walk {
            let p = env.sample_walking_node(&mut rng, budget_w)?;
            g.push_node(p, ModeTag::Walking);
        }
        let budget_f = SAMPLING_BUDGET_FACTOR * config.n_fly.max(1);
        for _ in 0..config.n_fly {
            let p = env.sample_flying_node(&mut rng, budget_f)?;
            g.push_node(p, ModeTag::Flying);
        }
        g.n_sampled = g.nodes.len();

        let r = config.radius;
        let nodes = &g.nodes;
        let per_node: Vec<Vec<(usize, usize, EdgeKind)>> = (0..nodes.len())
            .into_par_iter()
            .map(|i| {
                (0..i)
                    .filter(|&j| (nodes[i].pos - nodes[j].pos).norm() <= r)
                    .filter_map(|j| classify_edge(env, &nodes[j], &nodes[i]).map(|k| (j, i, k)))
                    .collect()
            })
            .collect();
        for (a, b, k) in per_node.into_iter().flatten() {
            g.push_edge(a, b, k);
        }
        log::debug!("mm-prm: {} nodes, {} edges", g.nodes.len(), g.edges.len());
        Ok(g)
    }

    /// Lattice baseline with 26-neighbour connectivity. Each lattice column
    /// holds one walking node on its walkable surface plus flying nodes at
    /// the lattice heights clear of that surface. A walking node links to
    /// the lowest flying node of its own and the eight adjacent columns.
    pub fn build_uniform_grid(env: &EnvironmentMap, spacing: f64) -> Result<Self, PlannerError> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(PlannerError::InvalidConfig(format!("grid spacing = {spacing}")));
        }
        env.validate()?;
        let b = &env.bounds;
        let count = |lo: f64, hi: f64| ((hi - lo) / spacing + 1e-9).floor() as usize + 1;
        let (nx, ny, nz) = (count(b.min.x, b.max.x), count(b.min.y, b.max.y), count(b.min.z, b.max.z));
        let candidates = nx.saturating_mul(ny).saturating_mul(nz + 1);
        if candidates > MAX_GRID_NODES {
            return Err(PlannerError::GridTooLarge(candidates));
        }
        let at = |i: usize, j: usize, k: usize| {
            Vec3::new(b.min.x + i as f64 * spacing, b.min.y + j as f64 * spacing, b.min.z + k as f64 * spacing)
        };

        let mut g = Self::default();
        let mut walk: HashMap<(usize, usize), usize> = HashMap::new();
        let mut fly: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for i in 0..nx {
            for j in 0..ny {
                let p = at(i, j, 0);
                if let Some(h) = env.walkable_height(p.x, p.y) {
                    walk.insert((i, j), g.push_node(Vec3::new(p.x, p.y, h), ModeTag::Walking));
                }
                for k in 0..nz {
                    let q = at(i, j, k);
                    if env.is_flying_position(&q) {
                        fly.insert((i, j, k), g.push_node(q, ModeTag::Flying));
                    }
                }
            }
        }
        g.n_sampled = g.nodes.len();

        let offsets: Vec<(i64, i64, i64)> = (-1..=1)
            .flat_map(|x| (-1..=1).flat_map(move |y| (-1..=1).map(move |z| (x, y, z))))
            .filter(|&o| o > (0, 0, 0))
            .collect();
        let shift = |i: usize, d: i64| -> Option<usize> { usize::try_from(i as i64 + d).ok() };
        let layer_at_or_above = |z: f64| ((z - b.min.z) / spacing - 1e-9).ceil().max(0.0) as usize;

        let mut candidates_pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                if let Some(&w) = walk.get(&(i, j)) {
                    for &(dx, dy, dz) in &offsets {
                        if dz != 0 {
                            continue;
                        }
                        if let (Some(a), Some(bb)) = (shift(i, dx), shift(j, dy)) {
                            if let Some(&v) = walk.get(&(a, bb)) {
                                candidates_pairs.push((w, v));
                            }
                        }
                    }
                    let kw = layer_at_or_above(g.nodes[w].pos.z);
                    for dx in -1..=1 {
                        for dy in -1..=1 {
                            if let (Some(a), Some(bb)) = (shift(i, dx), shift(j, dy)) {
                                if let Some(&f) = (kw..nz).find_map(|k| fly.get(&(a, bb, k))) {
                                    candidates_pairs.push((w, f));
                                }
                            }
                        }
                    }
                }
                for k in 0..nz {
                    if let Some(&f) = fly.get(&(i, j, k)) {
                        for &(dx, dy, dz) in &offsets {
                            if let (Some(a), Some(bb), Some(c)) = (shift(i, dx), shift(j, dy), shift(k, dz)) {
                                if let Some(&v) = fly.get(&(a, bb, c)) {
                                    candidates_pairs.push((f, v));
                                }
                            }
                        }
                    }
                }
            }
        }
        let nodes = &g.nodes;
        let kinds: Vec<Option<EdgeKind>> =
            candidates_pairs.par_iter().map(|&(a, bb)| classify_edge(env, &nodes[a], &nodes[bb])).collect();
        for (&(a, bb), k) in candidates_pairs.iter().zip(kinds) {
            if let Some(k) = k {
                g.push_edge(a, bb, k);
            }
        }
        Ok(g)
    }

    pub fn export(&self, costs: &EdgeCosts) -> RoadmapExport {
        RoadmapExport {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .zip(costs.forward.iter().zip(&costs.reverse))
                .map(|(e, (&f, &r))| EdgeExport { a: e.a, b: e.b, kind: e.kind, length: e.length, cost: f, cost_reverse: r })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeExport {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
    pub length: f64,
    /// Cost of traversing `a → b`, J.
    pub cost: f64,
    /// Cost of traversing `b → a`, J.
    pub cost_reverse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoadmapExport {
    pub nodes: Vec<RoadmapNode>,
    pub edges: Vec<EdgeExport>,
}

/// Directional edge costs aligned with `RoadmapGraph::edges`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCosts {
    pub forward: Vec<f64>,
    pub reverse: Vec<f64>,
}

fn directed_cost(kind: EdgeKind, length: f64, from: &Vec3, to: &Vec3, walk: f64, model: &CostModel) -> f64 {
    match kind {
        EdgeKind::Walk => walk,
        EdgeKind::Fly => fly_edge_cost(length, from.z, to.z, model),
        EdgeKind::Transition => transition_cost(model) + fly_edge_cost(length, from.z, to.z, model),
    }
}

impl EdgeCosts {
    /// Costs from the calibrated constants.
    pub fn from_model(graph: &RoadmapGraph, model: &CostModel) -> Self {
        Self::with_walk_cost(graph, model, |d| walk_edge_cost(d, model))
    }

    fn with_walk_cost(graph: &RoadmapGraph, model: &CostModel, walk: impl Fn(f64) -> f64) -> Self {
        let mut forward = Vec::with_capacity(graph.edges.len());
        let mut reverse = Vec::with_capacity(graph.edges.len());
        for e in &graph.edges {
            let (pa, pb) = (&graph.nodes[e.a].pos, &graph.nodes[e.b].pos);
            let w = if e.kind == EdgeKind::Walk { walk(e.length) } else { 0.0 };
            forward.push(directed_cost(e.kind, e.length, pa, pb, w, model));
            reverse.push(directed_cost(e.kind, e.length, pb, pa, w, model));
        }
        Self { forward, reverse }
    }

    /// Walking costs from per-length rollouts: `rollout(L)` returns the
    /// energy of walking `L` metres. Lengths are quantised to
    /// [`HIFI_QUANTUM`] and each distinct quantum is simulated once.
    pub fn high_fidelity<F>(graph: &RoadmapGraph, model: &CostModel, rollout: F) -> Self
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let key = |d: f64| ((d / HIFI_QUANTUM).round() as u64).max(1);
        let mut keys: Vec<u64> = graph.edges.iter().filter(|e| e.kind == EdgeKind::Walk).map(|e| key(e.length)).collect();
        keys.sort_unstable();
        keys.dedup();
        let rates: BTreeMap<u64, f64> = keys
            .par_iter()
            .map(|&k| {
                let l = k as f64 * HIFI_QUANTUM;
                (k, rollout(l).max(0.0) / l)
            })
            .collect();
        Self::with_walk_cost(graph, model, |d| rates[&key(d)] * d)
    }

    /// Cost of traversing edge `idx` starting from node `from`.
    pub fn cost(&self, graph: &RoadmapGraph, idx: usize, from: usize) -> f64 {
        if graph.edges[idx].a == from {
            self.forward[idx]
        } else {
            self.reverse[idx]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Box3;

    fn empty_env(x: f64, y: f64, z: f64) -> EnvironmentMap {
        EnvironmentMap::new(Box3::new(Vec3::zeros(), Vec3::new(x, y, z)), 0.0, vec![]).unwrap()
    }

    fn cluttered() -> EnvironmentMap {
        let obstacles = vec![
            Box3::new(Vec3::new(4.0, 0.0, 0.0), Vec3::new(5.0, 14.0, 3.0)),
            Box3::walkable(Vec3::new(10.0, 3.0, 0.0), Vec3::new(14.0, 8.0, 1.5)),
            Box3::new(Vec3::new(15.0, 10.0, 0.0), Vec3::new(18.0, 13.0, 5.0)),
            Box3::walkable(Vec3::new(2.0, 15.0, 0.0), Vec3::new(8.0, 19.0, 2.5)),
        ];
        EnvironmentMap::new(Box3::new(Vec3::zeros(), Vec3::new(20.0, 20.0, 6.0)), 0.0, obstacles).unwrap()
    }

    #[test]
    fn two_walking_nodes_one_walk_edge() {
        let env = empty_env(3.0, 3.0, 3.0);
        let g = RoadmapGraph::build_mm_prm(&env, &PrmConfig { radius: 10.0, n_walk: 2, n_fly: 0, seed: 1 }).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].kind, EdgeKind::Walk);
    }

    #[test]
    fn no_walking_nodes_means_no_walk_or_transition_edges() {
        let env = cluttered();
        let g = RoadmapGraph::build_mm_prm(&env, &PrmConfig { radius: 4.0, n_walk: 0, n_fly: 80, seed: 3 }).unwrap();
        assert_eq!(g.count_mode(ModeTag::Walking), 0);
        assert_eq!(g.count_kind(EdgeKind::Walk) + g.count_kind(EdgeKind::Transition), 0);
        assert!(g.count_kind(EdgeKind::Fly) > 0);
    }

    #[test]
    fn six_hundred_node_counts() {
        let env = cluttered();
        let g = RoadmapGraph::build_mm_prm(&env, &PrmConfig { radius: 4.0, n_walk: 300, n_fly: 300, seed: 7 }).unwrap();
        assert_eq!(g.count_mode(ModeTag::Walking), 300);
        assert_eq!(g.count_mode(ModeTag::Flying), 300);
        assert!((3_000..100_000).contains(&g.edges.len()), "{} edges", g.edges.len());
        for n in &g.nodes {
            match n.mode {
                ModeTag::Walking => assert_eq!(env.walkable_height(n.pos.x, n.pos.y), Some(n.pos.z)),
                ModeTag::Flying => assert!(env.is_flying_position(&n.pos)),
            }
        }
        for e in &g.edges {
            let (a, b) = (g.nodes[e.a], g.nodes[e.b]);
            let expected = match (a.mode, b.mode) {
                (ModeTag::Walking, ModeTag::Walking) => EdgeKind::Walk,
                (ModeTag::Flying, ModeTag::Flying) => EdgeKind::Fly,
                _ => EdgeKind::Transition,
            };
            assert_eq!(e.kind, expected);
            assert!(e.length <= 4.0);
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let env = cluttered();
        let cfg = PrmConfig { radius: 4.0, n_walk: 60, n_fly: 60, seed: 11 };
        let a = RoadmapGraph::build_mm_prm(&env, &cfg).unwrap();
        let b = RoadmapGraph::build_mm_prm(&env, &cfg).unwrap();
        let m = CostModel::nominal();
        let ja = serde_json::to_string(&a.export(&EdgeCosts::from_model(&a, &m))).unwrap();
        let jb = serde_json::to_string(&b.export(&EdgeCosts::from_model(&b, &m))).unwrap();
        assert_eq!(ja, jb);
        let c = RoadmapGraph::build_mm_prm(&env, &PrmConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a.nodes, c.nodes);
    }

    #[test]
    fn grid_cube_has_27_points() {
        let env = empty_env(1.0, 1.0, 1.0);
        let g = RoadmapGraph::build_uniform_grid(&env, 0.5).unwrap();
        assert_eq!(g.len(), 27);
        assert_eq!(g.count_mode(ModeTag::Walking), 9);
    }

    #[test]
    fn grid_obstructed_is_empty() {
        let env = EnvironmentMap::new(
            Box3::new(Vec3::zeros(), Vec3::new(2.0, 2.0, 2.0)),
            0.0,
            vec![Box3::new(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(3.0, 3.0, 3.0))],
        )
        .unwrap();
        let g = RoadmapGraph::build_uniform_grid(&env, 0.5).unwrap();
        assert!(g.is_empty() && g.edges.is_empty());
    }

    #[test]
    fn grid_guard_and_ratio() {
        let env = cluttered();
        assert!(matches!(RoadmapGraph::build_uniform_grid(&env, 0.05), Err(PlannerError::GridTooLarge(_))));
        let grid = RoadmapGraph::build_uniform_grid(&env, 0.5).unwrap();
        assert!(grid.len() >= 10 * 600, "{}", grid.len());
    }

    #[test]
    fn edge_costs_are_directional_and_non_negative() {
        let env = cluttered();
        let g = RoadmapGraph::build_mm_prm(&env, &PrmConfig { radius: 4.0, n_walk: 80, n_fly: 80, seed: 5 }).unwrap();
        let m = CostModel::nominal();
        let c = EdgeCosts::from_model(&g, &m);
        for (i, e) in g.edges.iter().enumerate() {
            assert!(c.forward[i] >= 0.0 && c.reverse[i] >= 0.0);
            match e.kind {
                EdgeKind::Walk => assert_eq!(c.forward[i], c.reverse[i]),
                EdgeKind::Fly => {
                    let dz = g.nodes[e.b].pos.z - g.nodes[e.a].pos.z;
                    let up = fly_edge_cost(e.length, 0.0, dz, &m);
                    let down = fly_edge_cost(e.length, dz, 0.0, &m);
                    assert_eq!((c.forward[i], c.reverse[i]), (up, down));
                }
                EdgeKind::Transition => assert!(c.forward[i].min(c.reverse[i]) >= m.c_t),
            }
        }
    }

    #[test]
    fn high_fidelity_memoises_by_length() {
        let env = empty_env(6.0, 6.0, 3.0);
        let g = RoadmapGraph::build_mm_prm(&env, &PrmConfig { radius: 3.0, n_walk: 30, n_fly: 0, seed: 2 }).unwrap();
        let calls = std::sync::atomic::AtomicUsize::new(0);
        let c = EdgeCosts::high_fidelity(&g, &CostModel::nominal(), |l| {
            calls.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            40.0 * l
        });
        assert!(calls.into_inner() < g.edges.len());
        for (i, e) in g.edges.iter().enumerate() {
            assert!((c.forward[i] - 40.0 * e.length).abs() < 1e-9);
        }
    }

    #[test]
    fn endpoints_attach_with_their_mode() {
        let env = cluttered();
        let mut g = RoadmapGraph::build_mm_prm(&env, &PrmConfig { radius: 4.0, n_walk: 100, n_fly: 100, seed: 9 }).unwrap();
        let s = g.insert_endpoint(&env, Vec3::new(1.0, 1.0, 0.0), 4.0).unwrap();
        let t = g.insert_endpoint(&env, Vec3::new(12.0, 5.0, 1.5), 4.0).unwrap();
        assert_eq!(g.nodes[s].mode, ModeTag::Walking);
        assert_eq!(g.nodes[t].mode, ModeTag::Walking);
        assert_eq!(g.n_sampled, 200);
        assert!(!g.adjacency[s].is_empty());
        assert!(g.insert_endpoint(&env, Vec3::new(4.5, 5.0, 1.0), 4.0).is_err());
    }
}
