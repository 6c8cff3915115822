//! Palette, grid geometry and small helpers shared by the families.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::render::{Element, Rgb, SceneSpec, Shape, CANVAS};
use crate::sample::{State, Trajectory};
use crate::solvers::Cell;

pub const GRID_LINE: Rgb = Rgb(20, 20, 20);
pub const LIGHT_GRAY: Rgb = Rgb(215, 215, 215);
pub const MID_GRAY: Rgb = Rgb(120, 120, 120);

/// Named colors used for prompt-visible elements. Pairwise per-channel
/// distance is at least 70, so exact renders never fall inside another
/// color's detection tolerance.
pub const PALETTE: [(&str, Rgb); 9] = [
    ("Red", Rgb(220, 40, 40)),
    ("Blue", Rgb(40, 90, 220)),
    ("Green", Rgb(40, 170, 70)),
    ("Yellow", Rgb(240, 210, 0)),
    ("Orange", Rgb(245, 140, 30)),
    ("Purple", Rgb(150, 60, 200)),
    ("Pink", Rgb(240, 110, 180)),
    ("Teal", Rgb(20, 160, 160)),
    ("Brown", Rgb(140, 90, 40)),
];

pub fn color(name: &str) -> Option<Rgb> {
    PALETTE.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, c)| *c)
}

pub fn named(name: &str) -> Rgb {
    color(name).unwrap_or_else(|| panic!("`{name}` is not a palette color"))
}

pub const RED: Rgb = PALETTE[0].1;
pub const BLUE: Rgb = PALETTE[1].1;
pub const GREEN: Rgb = PALETTE[2].1;
pub const YELLOW: Rgb = PALETTE[3].1;
pub const ORANGE: Rgb = PALETTE[4].1;

/// Square cells laid out centred on the canvas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridGeom {
    pub rows: i32,
    pub cols: i32,
    pub cell: f64,
    pub x0: f64,
    pub y0: f64,
}

impl GridGeom {
    /// Largest integral cell size so the grid fits in `extent` pixels.
    pub fn fit(rows: i32, cols: i32, extent: f64) -> Self {
        let cell = (extent / rows.max(cols) as f64).floor();
        let c = CANVAS as f64;
        GridGeom { rows, cols, cell, x0: ((c - cell * cols as f64) / 2.0).floor(), y0: ((c - cell * rows as f64) / 2.0).floor() }
    }

    pub fn center(&self, c: Cell) -> [f64; 2] {
        [self.x0 + (c.col as f64 + 0.5) * self.cell, self.y0 + (c.row as f64 + 0.5) * self.cell]
    }

    /// Cell rectangle shrunk by `inset` on every side.
    pub fn rect(&self, c: Cell, inset: f64) -> Shape {
        Shape::Rect {
            x: self.x0 + c.col as f64 * self.cell + inset,
            y: self.y0 + c.row as f64 * self.cell + inset,
            w: self.cell - 2.0 * inset,
            h: self.cell - 2.0 * inset,
        }
    }

    /// Cell containing pixel position `p`, if inside the grid.
    pub fn cell_at(&self, p: [f64; 2]) -> Option<Cell> {
        let col = ((p[0] - self.x0) / self.cell).floor();
        let row = ((p[1] - self.y0) / self.cell).floor();
        let c = Cell::new(row as i32, col as i32);
        (row >= 0.0 && col >= 0.0 && c.row < self.rows && c.col < self.cols).then_some(c)
    }

    pub fn width(&self) -> f64 {
        self.cell * self.cols as f64
    }

    pub fn height(&self) -> f64 {
        self.cell * self.rows as f64
    }

    /// Horizontal and vertical grid lines, ids `grid-h-i` / `grid-v-j`.
    pub fn push_lines(&self, scene: &mut SceneSpec, color: Rgb, width: f64, z: i32) {
        for i in 0..=self.rows {
            let y = self.y0 + i as f64 * self.cell;
            scene.push(Element::filled(format!("grid-h-{i}"), Shape::Line { from: [self.x0, y], to: [self.x0 + self.width(), y], width }, color, z));
        }
        for j in 0..=self.cols {
            let x = self.x0 + j as f64 * self.cell;
            scene.push(Element::filled(format!("grid-v-{j}"), Shape::Line { from: [x, self.y0], to: [x, self.y0 + self.height()], width }, color, z));
        }
    }
}

/// An "X" mark as one 12-vertex polygon; `h` is the half extent, `d` the arm half-width.
pub fn x_mark(c: [f64; 2], h: f64, d: f64) -> Shape {
    let pts = [
        [0.0, -d],
        [h - d, -h],
        [h, -h + d],
        [d, 0.0],
        [h, h - d],
        [h - d, h],
        [0.0, d],
        [-h + d, h],
        [-h, h - d],
        [-d, 0.0],
        [-h, -h + d],
        [-h + d, -h],
    ];
    Shape::Polygon { points: pts.iter().map(|p| [c[0] + p[0], c[1] + p[1]]).collect() }
}

pub fn random_cell<R: Rng + ?Sized>(rng: &mut R, rows: i32, cols: i32) -> Cell {
    Cell::new(rng.gen_range(0..rows), rng.gen_range(0..cols))
}

/// `k` distinct cells not in `exclude`, sorted; `None` when there is no room.
pub fn distinct_cells<R: Rng + ?Sized>(rng: &mut R, rows: i32, cols: i32, k: usize, exclude: &BTreeSet<Cell>) -> Option<Vec<Cell>> {
    let mut pool: Vec<Cell> = (0..rows).flat_map(|r| (0..cols).map(move |c| Cell::new(r, c))).filter(|c| !exclude.contains(c)).collect();
    if pool.len() < k {
        return None;
    }
    pool.shuffle(rng);
    pool.truncate(k);
    pool.sort();
    Some(pool)
}

/// Offsets of each state's position from where the element is drawn.
pub fn offsets(points: &[[f64; 2]], origin: [f64; 2]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p[0] - origin[0], p[1] - origin[1]]).collect()
}

pub fn cell_trajectory(cells: &[Cell], frames_per_step: u32) -> Trajectory {
    Trajectory::new(cells.iter().map(|c| State::cell(*c)).collect(), frames_per_step)
}

/// Shared legality check for grid walks: in-grid, 4-adjacent, open cells.
pub fn check_grid_walk(cells: &[Cell], rows: i32, cols: i32, blocked: &BTreeSet<Cell>) -> Result<(), String> {
    for (i, c) in cells.iter().enumerate() {
        if c.row < 0 || c.col < 0 || c.row >= rows || c.col >= cols {
            return Err(format!("state {i} ({},{}) leaves the grid", c.row, c.col));
        }
        if blocked.contains(c) {
            return Err(format!("state {i} ({},{}) is blocked", c.row, c.col));
        }
    }
    if let Some(i) = cells.windows(2).position(|w| !w[0].is_adjacent(w[1])) {
        return Err(format!("step {i} is not a single 4-neighbour move"));
    }
    Ok(())
}

pub fn int_pair(v: &[i64], i: usize) -> [f64; 2] {
    [v[2 * i] as f64, v[2 * i + 1] as f64]
}

pub fn pairs(v: &[i64]) -> Vec<[f64; 2]> {
    (0..v.len() / 2).map(|i| int_pair(v, i)).collect()
}
