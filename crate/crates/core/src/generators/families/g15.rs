//! Grid navigation around X-marked obstacles.

use std::collections::{BTreeMap, BTreeSet};

use rand_chacha::ChaCha8Rng;

use super::super::common::*;
use super::super::{FamilySpec, GenError, Stratum, TaskFamily};
use crate::render::{Animation, Element, ElementTrack, Rgb, SceneSpec, Shape, TrackAnimation};
use crate::sample::{ParamAssignment, ParamValue, Trajectory};
use crate::solvers::{bfs_path, bfs_shortest, Cell, Grid};

pub const START_COLOR: Rgb = BLUE;
pub const GOAL_COLOR: Rgb = RED;
pub const AGENT_COLOR: Rgb = YELLOW;
pub const OBSTACLE_COLOR: Rgb = GRID_LINE;

/// Everything the renderer and scorer need, rebuilt from parameters.
#[derive(Clone, Debug)]
pub struct Layout {
    pub n: i32,
    pub start: Cell,
    pub goal: Cell,
    pub obstacles: BTreeSet<Cell>,
    pub geom: GridGeom,
}

impl Layout {
    pub fn from_params(p: &ParamAssignment) -> Result<Self, GenError> {
        let n = p.int("grid_size")? as i32;
        Ok(Layout {
            n,
            start: p.cell("start")?,
            goal: p.cell("goal")?,
            obstacles: p.cells("obstacles")?.iter().copied().collect(),
            geom: GridGeom::fit(n, n, 440.0),
        })
    }

    pub fn grid(&self) -> Result<Grid, GenError> {
        Ok(Grid::new(self.n, self.n, self.obstacles.iter().copied(), self.start, self.goal)?)
    }

    pub fn agent_radius(&self) -> f64 {
        (self.geom.cell * 0.3).floor()
    }
}

pub struct G15 {
    spec: FamilySpec,
}

impl G15 {
    pub fn new(spec: FamilySpec) -> Self {
        Self { spec }
    }
}

impl TaskFamily for G15 {
    fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    fn draw(&self, rng: &mut ChaCha8Rng, st: Stratum<'_>) -> Result<Option<ParamAssignment>, GenError> {
        let n = st.pick(rng, "grid_size")? as i32;
        let k = st.pick(rng, "num_obstacles")? as usize;
        let start = random_cell(rng, n, n);
        let goal = random_cell(rng, n, n);
        if start.manhattan(goal) < (n - 1) as u32 {
            return Ok(None);
        }
        let Some(obstacles) = distinct_cells(rng, n, n, k, &[start, goal].into()) else {
            return Ok(None);
        };
        let grid = Grid::new(n, n, obstacles.iter().copied(), start, goal)?;
        if bfs_shortest(&grid).is_err() {
            return Ok(None);
        }
        let mut p = ParamAssignment::new(st.index);
        p.set("grid_size", ParamValue::Int(n as i64))
            .set("num_obstacles", ParamValue::Int(k as i64))
            .set("start", ParamValue::Cell(start))
            .set("goal", ParamValue::Cell(goal))
            .set("obstacles", ParamValue::Cells(obstacles));
        Ok(Some(p))
    }

    fn scene(&self, p: &ParamAssignment) -> Result<SceneSpec, GenError> {
        let l = Layout::from_params(p)?;
        let g = l.geom;
        let mut s = SceneSpec::new(Rgb::WHITE);
        s.push(Element::filled("start", g.rect(l.start, 2.0), START_COLOR, 0));
        s.push(Element::filled("goal", g.rect(l.goal, 2.0), GOAL_COLOR, 0));
        for (i, c) in l.obstacles.iter().enumerate() {
            s.push(Element::filled(format!("obstacle-{i}"), x_mark(g.center(*c), (g.cell * 0.32).floor(), (g.cell * 0.08).max(2.0).floor()), OBSTACLE_COLOR, 1));
        }
        g.push_lines(&mut s, GRID_LINE, 2.0, 2);
        let [cx, cy] = g.center(l.start);
        s.push(Element::filled("agent", Shape::Circle { cx, cy, r: l.agent_radius() }, AGENT_COLOR, 3));
        Ok(s)
    }

    fn solve(&self, p: &ParamAssignment) -> Result<Trajectory, GenError> {
        let path = bfs_shortest(&Layout::from_params(p)?.grid()?)?;
        Ok(cell_trajectory(&path, self.spec.frames_per_step))
    }

    fn check_solution(&self, p: &ParamAssignment, t: &Trajectory) -> Result<(), String> {
        let l = Layout::from_params(p).map_err(|e| e.to_string())?;
        let cells = t.cells().ok_or("states are not grid cells")?;
        if cells.first() != Some(&l.start) {
            return Err("trajectory does not start on the start cell".into());
        }
        if cells.last() != Some(&l.goal) {
            return Err("trajectory does not end on the goal cell".into());
        }
        check_grid_walk(&cells, l.n, l.n, &l.obstacles)?;
        let best = bfs_shortest(&l.grid().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if cells.len() != best.len() {
            return Err(format!("{} moves, optimum is {}", cells.len() - 1, best.len() - 1));
        }
        Ok(())
    }

    fn animation(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Box<dyn Animation + '_>, GenError> {
        let l = Layout::from_params(p)?;
        let cells = t.cells().ok_or_else(|| GenError::Config("G-15 states must be cells".into()))?;
        let centers: Vec<[f64; 2]> = cells.iter().map(|c| l.geom.center(*c)).collect();
        let o = offsets(&centers, l.geom.center(l.start));
        Ok(Box::new(TrackAnimation::new(self.scene(p)?, cells.len()).track(ElementTrack::moving("agent", o))))
    }

    fn prompt_fields(&self, p: &ParamAssignment) -> Result<BTreeMap<String, String>, GenError> {
        Ok([("grid_size", p.int("grid_size")?.to_string()), ("num_obstacles", p.int("num_obstacles")?.to_string())]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect())
    }

    fn salient(&self, p: &ParamAssignment) -> Vec<String> {
        let k = p.cells("obstacles").map_or(0, |o| o.len());
        let mut ids = vec!["start".to_string(), "goal".to_string()];
        ids.extend((0..k).map(|i| format!("obstacle-{i}")));
        ids
    }

    /// Detours through the first obstacle reachable when that obstacle alone is lifted.
    fn violating_trajectory(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Trajectory, GenError> {
        let l = Layout::from_params(p)?;
        for o in &l.obstacles {
            let mut relaxed = l.obstacles.clone();
            relaxed.remove(o);
            let grid = Grid::new(l.n, l.n, relaxed, l.start, l.goal)?;
            if let (Ok(a), Ok(b)) = (bfs_path(&grid, l.start, *o), bfs_path(&grid, *o, l.goal)) {
                let mut cells = a;
                cells.extend_from_slice(&b[1..]);
                return Ok(cell_trajectory(&cells, t.frames_per_step));
            }
        }
        Err(GenError::Config("no obstacle can be reached".into()))
    }
}
