//! Shortest route on a directed graph drawn with arrows.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::super::common::*;
use super::super::{FamilySpec, GenError, Stratum, TaskFamily};
use crate::render::detmath::sin_cos_deg;
use crate::render::{Animation, Element, ElementTrack, Rgb, SceneSpec, Shape, TrackAnimation};
use crate::sample::{ParamAssignment, ParamValue, State, Trajectory};
use crate::solvers::{digraph_shortest, DirectedGraph};

pub const NODE_RADIUS: f64 = 18.0;
pub const MIN_SEPARATION: f64 = 3.0 * NODE_RADIUS;
pub const NODE_COLOR: Rgb = MID_GRAY;
pub const START_COLOR: Rgb = GREEN;
pub const GOAL_COLOR: Rgb = RED;
pub const AGENT_COLOR: Rgb = BLUE;
pub const EDGE_COLOR: Rgb = Rgb(60, 60, 60);
const ARROW_WIDTH: f64 = 3.0;
const ARROW_HEAD: f64 = 14.0;
/// Edges keep this much clearance from nodes they do not touch.
const EDGE_CLEARANCE: f64 = NODE_RADIUS + 6.0;

#[derive(Clone, Debug)]
pub struct Layout {
    pub graph: DirectedGraph,
    pub hops: u32,
}

impl Layout {
    pub fn from_params(p: &ParamAssignment) -> Result<Self, GenError> {
        let positions = pairs(p.ints("positions")?);
        let edges = p.ints("edges")?.chunks(2).map(|e| (e[0] as usize, e[1] as usize)).collect();
        let graph = DirectedGraph::new(positions, edges, p.int("start")? as usize, p.int("goal")? as usize, MIN_SEPARATION)?;
        Ok(Layout { graph, hops: p.int("hops")? as u32 })
    }

    /// Arrow endpoints for an edge, trimmed to the node boundaries.
    pub fn arrow(&self, a: usize, b: usize) -> ([f64; 2], [f64; 2]) {
        let (p, q) = (self.graph.positions[a], self.graph.positions[b]);
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let len = (dx * dx + dy * dy).sqrt();
        let (ux, uy) = (dx / len, dy / len);
        ([p[0] + ux * NODE_RADIUS, p[1] + uy * NODE_RADIUS], [q[0] - ux * NODE_RADIUS, q[1] - uy * NODE_RADIUS])
    }

    /// Node whose disc contains `pt`.
    pub fn node_at(&self, pt: [f64; 2]) -> Option<usize> {
        self.graph
            .positions
            .iter()
            .position(|q| (q[0] - pt[0]).powi(2) + (q[1] - pt[1]).powi(2) <= NODE_RADIUS * NODE_RADIUS)
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((a[0] + t * dx - p[0]).powi(2) + (a[1] + t * dy - p[1]).powi(2)).sqrt()
}

/// Agent triangle centred on `c`.
pub fn agent_shape(c: [f64; 2]) -> Shape {
    Shape::Triangle { points: [[c[0], c[1] - 12.0], [c[0] + 11.0, c[1] + 9.0], [c[0] - 11.0, c[1] + 9.0]] }
}

pub struct G31 {
    spec: FamilySpec,
}

impl G31 {
    pub fn new(spec: FamilySpec) -> Self {
        Self { spec }
    }
}

impl TaskFamily for G31 {
    fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    fn draw(&self, rng: &mut ChaCha8Rng, st: Stratum<'_>) -> Result<Option<ParamAssignment>, GenError> {
        let n = st.pick(rng, "num_nodes")? as usize;
        let step = 360.0 / n as f64;
        let phase = rng.gen_range(0.0..step);
        let positions: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let deg = phase + step * i as f64 + rng.gen_range(-0.2..0.2) * step;
                let r = rng.gen_range(155.0..185.0);
                let (s, c) = sin_cos_deg(deg);
                [(256.0 + r * c).round(), (256.0 + r * s).round()]
            })
            .collect();

        let mut pairs_: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        pairs_.extend((0..n).filter(|_| rng.gen_bool(0.5)).map(|i| (i, (i + 2) % n)));
        for _ in 0..rng.gen_range(0..=n / 2) {
            pairs_.push((rng.gen_range(0..n), rng.gen_range(0..n)));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut edges = Vec::new();
        for (a, b) in pairs_ {
            if a == b || !seen.insert((a.min(b), a.max(b))) {
                continue;
            }
            edges.push(if rng.gen_bool(0.5) { (a, b) } else { (b, a) });
        }
        let start = rng.gen_range(0..n);
        let goal = rng.gen_range(0..n);
        if start == goal {
            return Ok(None);
        }
        let Ok(graph) = DirectedGraph::new(positions.clone(), edges.clone(), start, goal, MIN_SEPARATION) else {
            return Ok(None);
        };
        for &(a, b) in &edges {
            let (p, q) = (positions[a], positions[b]);
            if (0..n).filter(|&k| k != a && k != b).any(|k| segment_distance(positions[k], p, q) < EDGE_CLEARANCE) {
                return Ok(None);
            }
        }
        // Ignoring arrow directions must give a strictly shorter (wrong) route.
        let Some(hops) = graph.hops_from(start, false)[goal] else {
            return Ok(None);
        };
        let (lo, hi) = st.range("hops")?;
        let undirected = graph.undirected_hops_from(start)[goal].expect("connected");
        if (hops as i64) < lo.max(2) || hops as i64 > hi || undirected >= hops {
            return Ok(None);
        }
        let mut p = ParamAssignment::new(st.index);
        p.set("num_nodes", ParamValue::Int(n as i64))
            .set("positions", ParamValue::Ints(positions.iter().flat_map(|q| [q[0] as i64, q[1] as i64]).collect()))
            .set("edges", ParamValue::Ints(edges.iter().flat_map(|&(a, b)| [a as i64, b as i64]).collect()))
            .set("start", ParamValue::Int(start as i64))
            .set("goal", ParamValue::Int(goal as i64))
            .set("hops", ParamValue::Int(hops as i64));
        Ok(Some(p))
    }

    fn scene(&self, p: &ParamAssignment) -> Result<SceneSpec, GenError> {
        let l = Layout::from_params(p)?;
        let g = &l.graph;
        let mut s = SceneSpec::new(Rgb::WHITE);
        for (i, &(a, b)) in g.edges.iter().enumerate() {
            let (from, to) = l.arrow(a, b);
            s.push(Element::filled(format!("edge-{i}"), Shape::Arrow { from, to, width: ARROW_WIDTH, head: ARROW_HEAD }, EDGE_COLOR, 0));
        }
        for (i, q) in g.positions.iter().enumerate() {
            let color = if i == g.start {
                START_COLOR
            } else if i == g.goal {
                GOAL_COLOR
            } else {
                NODE_COLOR
            };
            s.push(Element::filled(format!("node-{i}"), Shape::Circle { cx: q[0], cy: q[1], r: NODE_RADIUS }, color, 1));
        }
        s.push(Element::filled("agent", agent_shape(g.positions[g.start]), AGENT_COLOR, 3));
        Ok(s)
    }

    fn solve(&self, p: &ParamAssignment) -> Result<Trajectory, GenError> {
        let path = digraph_shortest(&Layout::from_params(p)?.graph)?;
        Ok(Trajectory::new(path.into_iter().map(|id| State::Node { id }).collect(), self.spec.frames_per_step))
    }

    fn check_solution(&self, p: &ParamAssignment, t: &Trajectory) -> Result<(), String> {
        let l = Layout::from_params(p).map_err(|e| e.to_string())?;
        let nodes = t.nodes().ok_or("states are not graph nodes")?;
        if nodes.first() != Some(&l.graph.start) || nodes.last() != Some(&l.graph.goal) {
            return Err("trajectory must run from the start node to the goal node".into());
        }
        if let Some(w) = nodes.windows(2).find(|w| !l.graph.has_edge(w[0], w[1])) {
            return Err(format!("no directed edge {} -> {}", w[0], w[1]));
        }
        let best = l.graph.hops_from(l.graph.start, false)[l.graph.goal].ok_or("goal unreachable")?;
        if nodes.len() - 1 != best as usize || best != l.hops {
            return Err(format!("{} hops, optimum is {best}", nodes.len() - 1));
        }
        Ok(())
    }

    fn animation(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Box<dyn Animation + '_>, GenError> {
        let l = Layout::from_params(p)?;
        let nodes = t.nodes().ok_or_else(|| GenError::Config("G-31 states must be nodes".into()))?;
        if let Some(id) = nodes.iter().find(|&&id| id >= l.graph.node_count()) {
            return Err(GenError::Config(format!("node {id} does not exist")));
        }
        let centers: Vec<[f64; 2]> = nodes.iter().map(|&id| l.graph.positions[id]).collect();
        let o = offsets(&centers, l.graph.positions[l.graph.start]);
        Ok(Box::new(TrackAnimation::new(self.scene(p)?, nodes.len()).track(ElementTrack::moving("agent", o))))
    }

    fn prompt_fields(&self, p: &ParamAssignment) -> Result<BTreeMap<String, String>, GenError> {
        Ok([("num_nodes".to_string(), p.int("num_nodes")?.to_string())].into())
    }

    fn salient(&self, p: &ParamAssignment) -> Vec<String> {
        let n = p.int("num_nodes").unwrap_or(0);
        (0..n).map(|i| format!("node-{i}")).collect()
    }

    /// Steps back against the first edge's arrow and then repeats it.
    fn violating_trajectory(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Trajectory, GenError> {
        let _ = p;
        let mut states = t.states.clone();
        if states.len() < 2 {
            return Err(GenError::Config("trajectory has no edge to reverse".into()));
        }
        let (s, a) = (states[0].clone(), states[1].clone());
        states.splice(2..2, [s, a]);
        Ok(Trajectory::new(states, t.frames_per_step))
    }
}
