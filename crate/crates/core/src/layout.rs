//! Deterministic force-directed layout.
//!
//! A simple velocity-Verlet style simulation in the manner of d3-force:
//! pairwise repulsion, springs along edges and a pull towards the origin,
//! all scaled by a cooling factor that decays over the iterations.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::net::{Coord, Net, Node};

/// Rest length of edge springs.
pub const SPRING_LENGTH: f64 = 50.0;
/// Radius used to fan out nodes that share a source position.
pub const GRID_UNIT: f64 = 40.0;
/// A run counts as converged when no node moved farther than this in the
/// last iteration.
pub const CONVERGENCE_TOLERANCE: f64 = 0.1;

const VELOCITY_DECAY: f64 = 0.6;
const ALPHA_MIN: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct LayoutParams {
    pub repulsion: f64,
    pub link_strength: f64,
    pub gravity: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            repulsion: 200.0,
            link_strength: 1.0,
            gravity: 0.05,
            iterations: 300,
            seed: 0,
        }
    }
}

impl LayoutParams {
    pub fn validate(&self) -> Result<(), String> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_nonneg(self.repulsion) {
            return Err("repulsion must be finite and non-negative".into());
        }
        if !finite_nonneg(self.link_strength) {
            return Err("linkStrength must be finite and non-negative".into());
        }
        if !finite_nonneg(self.gravity) {
            return Err("gravity must be finite and non-negative".into());
        }
        if self.iterations == 0 {
            return Err("iterations must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LayoutGraph {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutResult {
    pub coords: BTreeMap<String, Coord>,
    pub converged: bool,
}

/// Lays out `graph`; nodes in `pinned` keep their coordinates. Edges naming
/// unknown nodes are ignored.
pub fn force_layout(
    graph: &LayoutGraph,
    params: &LayoutParams,
    pinned: &BTreeMap<String, Coord>,
) -> LayoutResult {
    let n = graph.nodes.len();
    let index: BTreeMap<&str, usize> = graph
        .nodes
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let edges: Vec<(usize, usize)> = graph
        .edges
        .iter()
        .filter_map(|(a, b)| Some((*index.get(a.as_str())?, *index.get(b.as_str())?)))
        .filter(|(a, b)| a != b)
        .collect();
    let fixed: Vec<Option<Coord>> = graph.nodes.iter().map(|id| pinned.get(id).copied()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let rotation = if params.seed == 0 { 0.0 } else { rng.gen::<f64>() * 2.0 * PI };
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut pos: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            if let Some(c) = fixed[i] {
                return (c.x, c.y);
            }
            let r = 10.0 * (i as f64).sqrt();
            let a = i as f64 * golden + rotation;
            (r * a.cos(), r * a.sin())
        })
        .collect();
    let mut vel = vec![(0.0f64, 0.0f64); n];

    let alpha_decay = 1.0 - ALPHA_MIN.powf(1.0 / params.iterations as f64);
    let mut alpha = 1.0;
    let mut last_move: f64 = 0.0;
    for _ in 0..params.iterations {
        alpha += (0.0 - alpha) * alpha_decay;
        for i in 0..n {
            for j in i + 1..n {
                let (mut dx, mut dy) = (pos[j].0 - pos[i].0, pos[j].1 - pos[i].1);
                if dx * dx + dy * dy < 1e-12 {
                    let a = (i * 31 + j * 17) as f64;
                    dx = a.cos() * 1e-3;
                    dy = a.sin() * 1e-3;
                }
                let d2 = (dx * dx + dy * dy).max(1.0);
                let f = params.repulsion * alpha / d2;
                vel[i].0 -= dx * f;
                vel[i].1 -= dy * f;
                vel[j].0 += dx * f;
                vel[j].1 += dy * f;
            }
        }
        for &(a, b) in &edges {
            let (dx, dy) = (pos[b].0 - pos[a].0, pos[b].1 - pos[a].1);
            let d = (dx * dx + dy * dy).sqrt().max(1e-6);
            let k = (d - SPRING_LENGTH) / d * params.link_strength * alpha * 0.5;
            vel[a].0 += dx * k;
            vel[a].1 += dy * k;
            vel[b].0 -= dx * k;
            vel[b].1 -= dy * k;
        }
        last_move = 0.0;
        for i in 0..n {
            if fixed[i].is_some() {
                vel[i] = (0.0, 0.0);
                continue;
            }
            vel[i].0 -= pos[i].0 * params.gravity * alpha;
            vel[i].1 -= pos[i].1 * params.gravity * alpha;
            vel[i].0 *= VELOCITY_DECAY;
            vel[i].1 *= VELOCITY_DECAY;
            pos[i].0 += vel[i].0;
            pos[i].1 += vel[i].1;
            last_move = last_move.max((vel[i].0 * vel[i].0 + vel[i].1 * vel[i].1).sqrt());
        }
    }

    LayoutResult {
        coords: graph
            .nodes
            .iter()
            .zip(&pos)
            .map(|(id, &(x, y))| (id.clone(), Coord::new(x, y)))
            .collect(),
        converged: last_move < CONVERGENCE_TOLERANCE,
    }
}

/// Coordinates for derived nodes from the nodes they correspond to. Nodes
/// sharing a source are spread on a circle of radius [`GRID_UNIT`] around
/// it; nodes whose source has no coordinate are left out.
pub fn transfer_coords<K: Clone, S: Ord>(
    source: &BTreeMap<S, Coord>,
    correspondence: &[(K, S)],
) -> Vec<(K, Coord)> {
    let mut groups: BTreeMap<&S, Vec<&K>> = BTreeMap::new();
    for (k, s) in correspondence {
        groups.entry(s).or_default().push(k);
    }
    let mut out = Vec::new();
    for (k, s) in correspondence {
        let Some(c) = source.get(s) else { continue };
        let group = &groups[s];
        if group.len() == 1 {
            out.push((k.clone(), *c));
            continue;
        }
        let i = group
            .iter()
            .position(|g| std::ptr::eq(*g, k))
            .expect("member of its group");
        let a = 2.0 * PI * i as f64 / group.len() as f64;
        out.push((k.clone(), Coord::new(c.x + GRID_UNIT * a.cos(), c.y + GRID_UNIT * a.sin())));
    }
    out
}

/// Coordinates for every node of `net`: stored ones are kept, the rest
/// come from the force simulation.
pub fn layout_net(net: &Net, params: &LayoutParams) -> BTreeMap<Node, Coord> {
    let nodes: Vec<Node> = net.nodes().collect();
    let graph = LayoutGraph {
        nodes: nodes.iter().map(|&n| net.node_id(n).to_string()).collect(),
        edges: (0..net.transition_count())
            .flat_map(|t| {
                let tid = net.transition(t).id.clone();
                net.pre(t)
                    .iter()
                    .map(move |&p| (p, true))
                    .chain(net.post(t).iter().map(|&p| (p, false)))
                    .map(move |(p, into)| {
                        let pid = net.place(p).id.clone();
                        if into {
                            (pid, tid.clone())
                        } else {
                            (tid.clone(), pid)
                        }
                    })
                    .collect::<Vec<_>>()
            })
            .collect(),
    };
    let pinned: BTreeMap<String, Coord> = nodes
        .iter()
        .filter_map(|&n| Some((net.node_id(n).to_string(), net.coord(n)?)))
        .collect();
    let result = force_layout(&graph, params, &pinned);
    nodes
        .iter()
        .map(|&n| (n, result.coords[net.node_id(n)]))
        .collect()
}
