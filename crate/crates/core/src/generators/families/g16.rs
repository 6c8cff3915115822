//! Grid route that must pass through every blue block.

use std::collections::{BTreeMap, BTreeSet};

use rand_chacha::ChaCha8Rng;

use super::super::common::*;
use super::super::{FamilySpec, GenError, Stratum, TaskFamily};
use crate::render::{Animation, Element, ElementTrack, Rgb, SceneSpec, Shape, TrackAnimation};
use crate::sample::{ParamAssignment, ParamValue, Trajectory};
use crate::solvers::{bfs_path, visit_all_shortest, Cell, Grid};

pub const START_COLOR: Rgb = GREEN;
pub const GOAL_COLOR: Rgb = RED;
pub const AGENT_COLOR: Rgb = ORANGE;
pub const TARGET_COLOR: Rgb = BLUE;

#[derive(Clone, Debug)]
pub struct Layout {
    pub n: i32,
    pub start: Cell,
    pub goal: Cell,
    pub targets: Vec<Cell>,
    pub geom: GridGeom,
}

impl Layout {
    pub fn from_params(p: &ParamAssignment) -> Result<Self, GenError> {
        let n = p.int("grid_size")? as i32;
        Ok(Layout {
            n,
            start: p.cell("start")?,
            goal: p.cell("goal")?,
            targets: p.cells("targets")?.to_vec(),
            geom: GridGeom::fit(n, n, 440.0),
        })
    }

    pub fn grid(&self) -> Result<Grid, GenError> {
        Ok(Grid::new(self.n, self.n, [], self.start, self.goal)?)
    }

    pub fn optimum(&self) -> Result<Vec<Cell>, GenError> {
        Ok(visit_all_shortest(&self.grid()?, &self.targets)?)
    }

    pub fn agent_radius(&self) -> f64 {
        (self.geom.cell * 0.3).floor()
    }
}

pub struct G16 {
    spec: FamilySpec,
}

impl G16 {
    pub fn new(spec: FamilySpec) -> Self {
        Self { spec }
    }
}

impl TaskFamily for G16 {
    fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    fn draw(&self, rng: &mut ChaCha8Rng, st: Stratum<'_>) -> Result<Option<ParamAssignment>, GenError> {
        let n = st.pick(rng, "grid_size")? as i32;
        let k = st.pick(rng, "num_targets")? as usize;
        let start = random_cell(rng, n, n);
        let goal = random_cell(rng, n, n);
        if start.manhattan(goal) < 2 {
            return Ok(None);
        }
        let Some(targets) = distinct_cells(rng, n, n, k, &[start, goal].into()) else {
            return Ok(None);
        };
        let mut p = ParamAssignment::new(st.index);
        p.set("grid_size", ParamValue::Int(n as i64))
            .set("num_targets", ParamValue::Int(k as i64))
            .set("start", ParamValue::Cell(start))
            .set("goal", ParamValue::Cell(goal))
            .set("targets", ParamValue::Cells(targets.clone()));
        let l = Layout::from_params(&p)?;
        // The blocks must force a detour, and skipping them must be possible.
        let best = l.optimum()?;
        if best.len() as u32 - 1 <= start.manhattan(goal) {
            return Ok(None);
        }
        let avoid = Grid::new(n, n, targets, start, goal)?;
        if bfs_path(&avoid, start, goal).is_err() {
            return Ok(None);
        }
        Ok(Some(p))
    }

    fn scene(&self, p: &ParamAssignment) -> Result<SceneSpec, GenError> {
        let l = Layout::from_params(p)?;
        let g = l.geom;
        let mut s = SceneSpec::new(Rgb::WHITE);
        s.push(Element::filled("start", g.rect(l.start, 2.0), START_COLOR, 0));
        s.push(Element::filled("goal", g.rect(l.goal, 2.0), GOAL_COLOR, 0));
        for (i, c) in l.targets.iter().enumerate() {
            s.push(Element::filled(format!("target-{i}"), g.rect(*c, (g.cell * 0.12).floor()), TARGET_COLOR, 0));
        }
        g.push_lines(&mut s, GRID_LINE, 2.0, 2);
        let [cx, cy] = g.center(l.start);
        s.push(Element::filled("agent", Shape::Circle { cx, cy, r: l.agent_radius() }, AGENT_COLOR, 3));
        Ok(s)
    }

    fn solve(&self, p: &ParamAssignment) -> Result<Trajectory, GenError> {
        Ok(cell_trajectory(&Layout::from_params(p)?.optimum()?, self.spec.frames_per_step))
    }

    fn check_solution(&self, p: &ParamAssignment, t: &Trajectory) -> Result<(), String> {
        let l = Layout::from_params(p).map_err(|e| e.to_string())?;
        let cells = t.cells().ok_or("states are not grid cells")?;
        if cells.first() != Some(&l.start) {
            return Err("trajectory does not start on the start cell".into());
        }
        if cells.last() != Some(&l.goal) {
            return Err("trajectory does not end on the end cell".into());
        }
        check_grid_walk(&cells, l.n, l.n, &BTreeSet::new())?;
        if let Some(t) = l.targets.iter().find(|t| !cells.contains(t)) {
            return Err(format!("block ({},{}) is never visited", t.row, t.col));
        }
        let best = l.optimum().map_err(|e| e.to_string())?;
        if cells.len() != best.len() {
            return Err(format!("{} moves, optimum is {}", cells.len() - 1, best.len() - 1));
        }
        Ok(())
    }

    fn animation(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Box<dyn Animation + '_>, GenError> {
        let l = Layout::from_params(p)?;
        let cells = t.cells().ok_or_else(|| GenError::Config("G-16 states must be cells".into()))?;
        let centers: Vec<[f64; 2]> = cells.iter().map(|c| l.geom.center(*c)).collect();
        let o = offsets(&centers, l.geom.center(l.start));
        Ok(Box::new(TrackAnimation::new(self.scene(p)?, cells.len()).track(ElementTrack::moving("agent", o))))
    }

    fn prompt_fields(&self, p: &ParamAssignment) -> Result<BTreeMap<String, String>, GenError> {
        Ok([("grid_size", p.int("grid_size")?.to_string()), ("num_targets", p.int("num_targets")?.to_string())]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect())
    }

    fn salient(&self, p: &ParamAssignment) -> Vec<String> {
        let k = p.cells("targets").map_or(0, |t| t.len());
        let mut ids = vec!["start".to_string(), "goal".to_string()];
        ids.extend((0..k).map(|i| format!("target-{i}")));
        ids
    }

    /// Goes straight to the end square, skipping every block.
    fn violating_trajectory(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Trajectory, GenError> {
        let l = Layout::from_params(p)?;
        let grid = Grid::new(l.n, l.n, l.targets.iter().copied(), l.start, l.goal)?;
        Ok(cell_trajectory(&bfs_path(&grid, l.start, l.goal)?, t.frames_per_step))
    }
}
