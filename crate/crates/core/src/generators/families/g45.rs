//! Pick up the named key in a maze and carry it to the door of the same color.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::super::common::*;
use super::super::{FamilySpec, GenError, Stratum, TaskFamily};
use crate::render::{Animation, Element, ElementTrack, Rgb, SceneSpec, Shape, TrackAnimation};
use crate::sample::{ParamAssignment, ParamValue, Trajectory};
use crate::solvers::{bfs_path, Cell, Grid};

pub const KEY_COLORS: [&str; 4] = ["Blue", "Red", "Yellow", "Purple"];
pub const AGENT_COLOR: Rgb = GREEN;
pub const WALL_COLOR: Rgb = GRID_LINE;

/// Perfect maze on a `(2n+1)`-tile grid. Rooms sit at odd coordinates.
pub fn carve_maze(n: i32, seed: u64) -> BTreeSet<Cell> {
    let t = 2 * n + 1;
    let mut open = BTreeSet::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let room = |r: i32, c: i32| Cell::new(2 * r + 1, 2 * c + 1);
    let mut visited = vec![false; (n * n) as usize];
    let mut stack = vec![(0, 0)];
    visited[0] = true;
    open.insert(room(0, 0));
    while let Some(&(r, c)) = stack.last() {
        let mut next: Vec<(i32, i32)> = [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]
            .into_iter()
            .filter(|&(a, b)| a >= 0 && b >= 0 && a < n && b < n && !visited[(a * n + b) as usize])
            .collect();
        if next.is_empty() {
            stack.pop();
            continue;
        }
        next.shuffle(&mut rng);
        let (a, b) = next[0];
        visited[(a * n + b) as usize] = true;
        open.insert(room(a, b));
        open.insert(Cell::new(r + a + 1, c + b + 1));
        stack.push((a, b));
    }
    debug_assert!(open.iter().all(|c| c.row < t && c.col < t));
    open
}

#[derive(Clone, Debug)]
pub struct Layout {
    pub tiles: i32,
    pub walls: BTreeSet<Cell>,
    pub start: Cell,
    pub colors: Vec<String>,
    pub keys: Vec<Cell>,
    pub doors: Vec<Cell>,
    pub target: usize,
    pub geom: GridGeom,
}

impl Layout {
    pub fn from_params(p: &ParamAssignment) -> Result<Self, GenError> {
        let n = p.int("maze_size")? as i32;
        let tiles = 2 * n + 1;
        let open = carve_maze(n, p.int("maze_seed")? as u64);
        let walls = (0..tiles).flat_map(|r| (0..tiles).map(move |c| Cell::new(r, c))).filter(|c| !open.contains(c)).collect();
        let colors = p.texts("colors")?.to_vec();
        let target_name = p.text("target")?;
        let target = colors
            .iter()
            .position(|c| c == target_name)
            .ok_or_else(|| GenError::Config(format!("target color {target_name} has no key")))?;
        Ok(Layout {
            tiles,
            walls,
            start: p.cell("start")?,
            colors,
            keys: p.cells("keys")?.to_vec(),
            doors: p.cells("doors")?.to_vec(),
            target,
            geom: GridGeom::fit(tiles, tiles, 440.0),
        })
    }

    pub fn grid(&self) -> Result<Grid, GenError> {
        Ok(Grid::new(self.tiles, self.tiles, self.walls.iter().copied(), self.start, self.doors[self.target])?)
    }

    pub fn key(&self) -> Cell {
        self.keys[self.target]
    }

    pub fn door(&self) -> Cell {
        self.doors[self.target]
    }

    /// Keys and doors of the other colors.
    pub fn distractors(&self) -> BTreeSet<Cell> {
        self.keys.iter().chain(&self.doors).copied().filter(|c| *c != self.key() && *c != self.door()).collect()
    }

    /// start -> key -> door, each leg a BFS shortest path.
    pub fn optimum(&self) -> Result<Vec<Cell>, GenError> {
        let g = self.grid()?;
        let mut path = bfs_path(&g, self.start, self.key())?;
        path.extend_from_slice(&bfs_path(&g, self.key(), self.door())?[1..]);
        Ok(path)
    }

    pub fn agent_radius(&self) -> f64 {
        (self.geom.cell * 0.32).floor()
    }
}

pub struct G45 {
    spec: FamilySpec,
}

impl G45 {
    pub fn new(spec: FamilySpec) -> Self {
        Self { spec }
    }
}

impl TaskFamily for G45 {
    fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    fn draw(&self, rng: &mut ChaCha8Rng, st: Stratum<'_>) -> Result<Option<ParamAssignment>, GenError> {
        let n = st.pick(rng, "maze_size")? as i32;
        let k = st.pick(rng, "num_colors")? as usize;
        let maze_seed = rng.gen::<u32>() as i64;
        let mut rooms: Vec<Cell> = (0..n).flat_map(|r| (0..n).map(move |c| Cell::new(2 * r + 1, 2 * c + 1))).collect();
        rooms.shuffle(rng);
        let mut colors: Vec<String> = KEY_COLORS.choose_multiple(rng, k).map(|s| s.to_string()).collect();
        colors.sort();
        let target = colors[rng.gen_range(0..k)].clone();
        let mut p = ParamAssignment::new(st.index);
        p.set("maze_size", ParamValue::Int(n as i64))
            .set("num_colors", ParamValue::Int(k as i64))
            .set("maze_seed", ParamValue::Int(maze_seed))
            .set("start", ParamValue::Cell(rooms[0]))
            .set("keys", ParamValue::Cells(rooms[1..=k].to_vec()))
            .set("doors", ParamValue::Cells(rooms[k + 1..=2 * k].to_vec()))
            .set("colors", ParamValue::Texts(colors))
            .set("target", ParamValue::Text(target));
        let l = Layout::from_params(&p)?;
        let path = l.optimum()?;
        let d = l.distractors();
        // The walk to the key must not pass through the door it opens.
        let key_at = path.iter().position(|c| *c == l.key()).expect("path visits the key");
        if path.iter().any(|c| d.contains(c)) || path[..key_at].contains(&l.door()) || path.len() < 2 * n as usize {
            return Ok(None);
        }
        Ok(Some(p))
    }

    fn scene(&self, p: &ParamAssignment) -> Result<SceneSpec, GenError> {
        let l = Layout::from_params(p)?;
        let g = l.geom;
        let mut s = SceneSpec::new(Rgb::WHITE);
        for (i, w) in l.walls.iter().enumerate() {
            s.push(Element::filled(format!("wall-{i}"), g.rect(*w, 0.0), WALL_COLOR, 0));
        }
        for (i, name) in l.colors.iter().enumerate() {
            let c = named(name);
            let lower = name.to_lowercase();
            let inset = (g.cell * 0.12).floor();
            s.push(Element::outlined(format!("door-{lower}"), g.rect(l.doors[i], inset), c, (g.cell * 0.12).floor().max(3.0), 1));
            let [cx, cy] = g.center(l.keys[i]);
            let h = (g.cell * 0.36).floor();
            s.push(Element::filled(format!("key-{lower}"), Shape::Diamond { cx, cy, half_w: h, half_h: h }, c, 1));
        }
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
            return Err("trajectory does not start at the agent".into());
        }
        if cells.last() != Some(&l.door()) {
            return Err("trajectory does not end at the matching door".into());
        }
        check_grid_walk(&cells, l.tiles, l.tiles, &l.walls)?;
        let key_at = cells.iter().position(|c| *c == l.key()).ok_or("the key is never picked up")?;
        if cells[..key_at].contains(&l.door()) {
            return Err("the door is reached before the key".into());
        }
        let d = l.distractors();
        if let Some(c) = cells.iter().find(|c| d.contains(c)) {
            return Err(format!("visits another color's item at ({},{})", c.row, c.col));
        }
        let best = l.optimum().map_err(|e| e.to_string())?;
        if cells.len() != best.len() {
            return Err(format!("{} moves, optimum is {}", cells.len() - 1, best.len() - 1));
        }
        Ok(())
    }

    fn animation(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Box<dyn Animation + '_>, GenError> {
        let l = Layout::from_params(p)?;
        let cells = t.cells().ok_or_else(|| GenError::Config("G-45 states must be cells".into()))?;
        let centers: Vec<[f64; 2]> = cells.iter().map(|c| l.geom.center(*c)).collect();
        let o = offsets(&centers, l.geom.center(l.start));
        let picked = cells.iter().position(|c| *c == l.key()).unwrap_or(cells.len());
        let visible = (0..cells.len()).map(|i| i < picked).collect();
        let key_id = format!("key-{}", l.colors[l.target].to_lowercase());
        Ok(Box::new(
            TrackAnimation::new(self.scene(p)?, cells.len())
                .track(ElementTrack::moving("agent", o))
                .track(ElementTrack::toggled(key_id, visible)),
        ))
    }

    fn prompt_fields(&self, p: &ParamAssignment) -> Result<BTreeMap<String, String>, GenError> {
        Ok([("num_colors".to_string(), p.int("num_colors")?.to_string()), ("color".to_string(), p.text("target")?.to_string())].into())
    }

    fn salient(&self, p: &ParamAssignment) -> Vec<String> {
        let mut ids = vec!["agent".to_string()];
        for c in p.texts("colors").unwrap_or_default() {
            let lower = c.to_lowercase();
            ids.push(format!("key-{lower}"));
            ids.push(format!("door-{lower}"));
        }
        ids
    }

    /// Steps into a wall next to the first cell that has one, then back.
    fn violating_trajectory(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Trajectory, GenError> {
        let l = Layout::from_params(p)?;
        let mut cells = t.cells().ok_or_else(|| GenError::Config("G-45 states must be cells".into()))?;
        for i in 0..cells.len() {
            if let Some(w) = cells[i].neighbors().into_iter().find(|w| l.walls.contains(w)) {
                let back = cells[i];
                cells.splice(i + 1..i + 1, [w, back]);
                return Ok(cell_trajectory(&cells, t.frames_per_step));
            }
        }
        Err(GenError::Config("no wall next to the path".into()))
    }
}
