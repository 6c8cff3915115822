//! Complete a mirror-symmetric grid, revealing the right half column by column.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::super::common::*;
use super::super::{FamilySpec, GenError, Stratum, TaskFamily};
use crate::render::{Animation, Element, RenderError, Rgb, SceneSpec, Shape};
use crate::sample::{ParamAssignment, ParamValue, State, Trajectory};
use crate::solvers::Cell;

pub const FILL_COLORS: [&str; 4] = ["Red", "Blue", "Green", "Orange"];
pub const AXIS_COLOR: Rgb = GRID_LINE;
pub const AXIS_WIDTH: f64 = 6.0;

#[derive(Clone, Debug)]
pub struct Layout {
    pub rows: usize,
    pub half: usize,
    pub colors: Vec<Rgb>,
    /// Left half, row-major, `0` = empty, otherwise a 1-based color index.
    pub left: Vec<u8>,
    pub geom: GridGeom,
}

impl Layout {
    pub fn from_params(p: &ParamAssignment) -> Result<Self, GenError> {
        let rows = p.int("rows")? as usize;
        let half = p.int("half_cols")? as usize;
        let colors = p.texts("colors")?.iter().map(|n| color(n).ok_or_else(|| GenError::Config(format!("unknown color {n}")))).collect::<Result<Vec<_>, _>>()?;
        let left: Vec<u8> = p.ints("left")?.iter().map(|&v| v as u8).collect();
        if left.len() != rows * half || left.iter().any(|&v| v as usize > colors.len()) {
            return Err(GenError::Config("left half does not match the grid".into()));
        }
        Ok(Layout { rows, half, colors, left, geom: GridGeom::fit(rows as i32, 2 * half as i32, 440.0) })
    }

    pub fn cols(&self) -> usize {
        2 * self.half
    }

    /// Full grid with the `revealed` right-half columns nearest the axis filled in.
    pub fn state(&self, revealed: usize) -> Vec<u8> {
        let (w, h) = (self.cols(), self.half);
        let mut cells = vec![0u8; self.rows * w];
        for r in 0..self.rows {
            for c in 0..h {
                cells[r * w + c] = self.left[r * h + c];
            }
            for k in 0..revealed {
                cells[r * w + h + k] = self.left[r * h + h - 1 - k];
            }
        }
        cells
    }

    pub fn complete(&self) -> Vec<u8> {
        self.state(self.half)
    }

    pub fn scene_for(&self, cells: &[u8]) -> Result<SceneSpec, GenError> {
        let g = self.geom;
        let w = self.cols();
        if cells.len() != self.rows * w {
            return Err(GenError::Config(format!("fill state has {} cells, grid has {}", cells.len(), self.rows * w)));
        }
        let mut s = SceneSpec::new(Rgb::WHITE);
        for (i, &v) in cells.iter().enumerate() {
            if v == 0 {
                continue;
            }
            let c = self.colors.get(v as usize - 1).ok_or_else(|| GenError::Config(format!("color index {v} out of range")))?;
            let cell = Cell::new((i / w) as i32, (i % w) as i32);
            s.push(Element::filled(format!("cell-{}-{}", cell.row, cell.col), g.rect(cell, 0.0), *c, 0));
        }
        g.push_lines(&mut s, GRID_LINE, 2.0, 1);
        let x = g.x0 + self.half as f64 * g.cell;
        s.push(Element::filled("axis", Shape::Line { from: [x, g.y0], to: [x, g.y0 + g.height()], width: AXIS_WIDTH }, AXIS_COLOR, 2));
        Ok(s)
    }
}

fn fill(s: &State) -> Option<&[u8]> {
    match s {
        State::Fill { cells } => Some(cells),
        _ => None,
    }
}

struct RevealAnimation {
    layout: Layout,
    states: Vec<Vec<u8>>,
}

impl Animation for RevealAnimation {
    fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Columns appear at the start of their state; in-between frames hold.
    fn scene_at(&self, step: usize, _num: u32, _den: u32) -> Result<SceneSpec, RenderError> {
        let cells = self.states.get(step).ok_or_else(|| RenderError::Animation(format!("no state {step}")))?;
        self.layout.scene_for(cells).map_err(|e| RenderError::Animation(e.to_string()))
    }
}

pub struct O49 {
    spec: FamilySpec,
}

impl O49 {
    pub fn new(spec: FamilySpec) -> Self {
        Self { spec }
    }
}

impl TaskFamily for O49 {
    fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    fn draw(&self, rng: &mut ChaCha8Rng, st: Stratum<'_>) -> Result<Option<ParamAssignment>, GenError> {
        let rows = st.pick(rng, "rows")? as usize;
        let half = st.pick(rng, "half_cols")? as usize;
        let k = st.pick(rng, "num_colors")? as usize;
        let colors: Vec<String> = FILL_COLORS.choose_multiple(rng, k).map(|s| s.to_string()).collect();
        let left: Vec<i64> = (0..rows * half).map(|_| if rng.gen_bool(0.35) { 0 } else { rng.gen_range(1..=k as i64) }).collect();
        // Every column must add something when revealed, and every color must appear.
        let column_filled = |c: usize| (0..rows).any(|r| left[r * half + c] != 0);
        if !(0..half).all(column_filled) || !(1..=k as i64).all(|v| left.contains(&v)) {
            return Ok(None);
        }
        let mut p = ParamAssignment::new(st.index);
        p.set("rows", ParamValue::Int(rows as i64))
            .set("half_cols", ParamValue::Int(half as i64))
            .set("num_colors", ParamValue::Int(k as i64))
            .set("colors", ParamValue::Texts(colors))
            .set("left", ParamValue::Ints(left));
        Ok(Some(p))
    }

    fn scene(&self, p: &ParamAssignment) -> Result<SceneSpec, GenError> {
        let l = Layout::from_params(p)?;
        l.scene_for(&l.state(0))
    }

    fn solve(&self, p: &ParamAssignment) -> Result<Trajectory, GenError> {
        let l = Layout::from_params(p)?;
        Ok(Trajectory::new((0..=l.half).map(|k| State::Fill { cells: l.state(k) }).collect(), self.spec.frames_per_step))
    }

    fn check_solution(&self, p: &ParamAssignment, t: &Trajectory) -> Result<(), String> {
        let l = Layout::from_params(p).map_err(|e| e.to_string())?;
        let states: Vec<&[u8]> = t.states.iter().map(fill).collect::<Option<_>>().ok_or("states are not fills")?;
        if states.first().copied() != Some(l.state(0).as_slice()) {
            return Err("trajectory does not start from the half-filled grid".into());
        }
        if states.last().copied() != Some(l.complete().as_slice()) {
            return Err("final grid is not the mirror image".into());
        }
        if states.len() != l.half + 1 {
            return Err(format!("{} reveal steps, expected one per column ({})", states.len() - 1, l.half));
        }
        if let Some(k) = (0..states.len()).find(|&k| states[k] != l.state(k).as_slice()) {
            return Err(format!("state {k} does not reveal the columns in order from the axis"));
        }
        Ok(())
    }

    fn animation(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Box<dyn Animation + '_>, GenError> {
        let layout = Layout::from_params(p)?;
        let states: Vec<Vec<u8>> =
            t.states.iter().map(|s| fill(s).map(<[u8]>::to_vec)).collect::<Option<_>>().ok_or_else(|| GenError::Config("O-49 states must be fills".into()))?;
        for s in &states {
            layout.scene_for(s)?;
        }
        Ok(Box::new(RevealAnimation { layout, states }))
    }

    fn prompt_fields(&self, p: &ParamAssignment) -> Result<BTreeMap<String, String>, GenError> {
        Ok([("rows".to_string(), p.int("rows")?.to_string()), ("cols".to_string(), (2 * p.int("half_cols")?).to_string())].into())
    }

    fn salient(&self, p: &ParamAssignment) -> Vec<String> {
        let Ok(l) = Layout::from_params(p) else { return Vec::new() };
        (0..l.rows * l.half).filter(|&i| l.left[i] != 0).map(|i| format!("cell-{}-{}", i / l.half, i % l.half)).collect()
    }

    /// Recolors the first filled mirrored cell once it is revealed.
    fn violating_trajectory(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Trajectory, GenError> {
        let l = Layout::from_params(p)?;
        let w = l.cols();
        let complete = l.complete();
        let idx = (0..complete.len()).find(|&i| i % w >= l.half && complete[i] != 0).ok_or_else(|| GenError::Config("nothing to recolor".into()))?;
        let wrong = complete[idx] % l.colors.len() as u8 + 1;
        let mut states = t.states.clone();
        for s in &mut states {
            if let State::Fill { cells } = s {
                if cells.get(idx).is_some_and(|&v| v != 0) {
                    cells[idx] = wrong;
                }
            }
        }
        Ok(Trajectory::new(states, t.frames_per_step))
    }
}
