use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::SolveError;

/// Row-major grid coordinate. Ordering is lexicographic (row, then column).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: i32,
    pub col: i32,
}

impl Cell {
    pub const fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }

    pub fn manhattan(self, other: Cell) -> u32 {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }

    pub fn is_adjacent(self, other: Cell) -> bool {
        self.manhattan(other) == 1
    }

    /// Up, down, left, right.
    pub fn neighbors(self) -> [Cell; 4] {
        [
            Cell::new(self.row - 1, self.col),
            Cell::new(self.row + 1, self.col),
            Cell::new(self.row, self.col - 1),
            Cell::new(self.row, self.col + 1),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub rows: i32,
    pub cols: i32,
    pub blocked: BTreeSet<Cell>,
    pub start: Cell,
    pub goal: Cell,
}

impl Grid {
    pub fn new(rows: i32, cols: i32, blocked: impl IntoIterator<Item = Cell>, start: Cell, goal: Cell) -> Result<Self, SolveError> {
        let g = Grid { rows, cols, blocked: blocked.into_iter().collect(), start, goal };
        if rows <= 0 || cols <= 0 {
            return Err(SolveError::InvalidInput(format!("grid must be non-empty, got {rows}x{cols}")));
        }
        if let Some(c) = g.blocked.iter().find(|c| !g.in_bounds(**c)) {
            return Err(SolveError::InvalidInput(format!("blocked cell {c:?} out of bounds")));
        }
        for (name, c) in [("start", start), ("goal", goal)] {
            if !g.in_bounds(c) {
                return Err(SolveError::InvalidInput(format!("{name} {c:?} out of bounds")));
            }
        }
        if g.blocked.contains(&start) {
            return Err(SolveError::InvalidInput("start is blocked".into()));
        }
        Ok(g)
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.row >= 0 && c.col >= 0 && c.row < self.rows && c.col < self.cols
    }

    pub fn is_open(&self, c: Cell) -> bool {
        self.in_bounds(c) && !self.blocked.contains(&c)
    }

    fn index(&self, c: Cell) -> usize {
        (c.row * self.cols + c.col) as usize
    }

    /// Whether `path` is a chain of 4-adjacent open cells.
    pub fn is_legal_path(&self, path: &[Cell]) -> bool {
        path.iter().all(|c| self.is_open(*c)) && path.windows(2).all(|w| w[0].is_adjacent(w[1]))
    }
}

/// Move counts from `from` to every cell; `None` where unreachable.
pub fn bfs_distances(grid: &Grid, from: Cell) -> Vec<Option<u32>> {
    let mut dist = vec![None; (grid.rows * grid.cols) as usize];
    if !grid.is_open(from) {
        return dist;
    }
    dist[grid.index(from)] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        let d = dist[grid.index(c)].unwrap();
        for n in c.neighbors() {
            if grid.is_open(n) && dist[grid.index(n)].is_none() {
                dist[grid.index(n)] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

/// Shortest 4-neighbour path between two cells. Neighbours are expanded
/// up, down, left, right; the first discovery of a cell fixes its parent.
pub fn bfs_path(grid: &Grid, from: Cell, to: Cell) -> Result<Vec<Cell>, SolveError> {
    if !grid.is_open(from) || !grid.is_open(to) {
        return Err(SolveError::NoPath);
    }
    let mut parent: Vec<Option<Cell>> = vec![None; (grid.rows * grid.cols) as usize];
    let mut seen = vec![false; parent.len()];
    seen[grid.index(from)] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        if c == to {
            let mut path = vec![c];
            let mut cur = c;
            while let Some(p) = parent[grid.index(cur)] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Ok(path);
        }
        for n in c.neighbors() {
            if grid.is_open(n) && !seen[grid.index(n)] {
                seen[grid.index(n)] = true;
                parent[grid.index(n)] = Some(c);
                queue.push_back(n);
            }
        }
    }
    Err(SolveError::NoPath)
}

pub fn bfs_shortest(grid: &Grid) -> Result<Vec<Cell>, SolveError> {
    bfs_path(grid, grid.start, grid.goal)
}

pub const MAX_VISIT_TARGETS: usize = 6;

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Shortest start -> all targets -> goal route. Orders are tried in
/// lexicographic order of the sorted target list; the first minimum wins.
pub fn visit_all_shortest(grid: &Grid, targets: &[Cell]) -> Result<Vec<Cell>, SolveError> {
    let mut ts: Vec<Cell> = targets.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if ts.len() > MAX_VISIT_TARGETS {
        return Err(SolveError::InvalidInput(format!("at most {MAX_VISIT_TARGETS} targets, got {}", ts.len())));
    }
    if let Some(t) = ts.iter().find(|t| !grid.is_open(**t)) {
        return Err(SolveError::InvalidInput(format!("target {t:?} is blocked or out of bounds")));
    }
    ts.sort();
    let from_start = bfs_distances(grid, grid.start);
    let from_target: Vec<Vec<Option<u32>>> = ts.iter().map(|t| bfs_distances(grid, *t)).collect();
    let goal_idx = grid.index(grid.goal);
    if !grid.is_open(grid.goal) || from_start[goal_idx].is_none() {
        return Err(SolveError::NoPath);
    }
    if ts.iter().any(|t| from_start[grid.index(*t)].is_none()) {
        return Err(SolveError::NoPath);
    }

    let mut order: Vec<usize> = (0..ts.len()).collect();
    let mut best: Option<(u32, Vec<usize>)> = None;
    loop {
        let mut total = 0u32;
        let mut prev: Option<usize> = None;
        for &k in &order {
            let leg = match prev {
                None => from_start[grid.index(ts[k])],
                Some(p) => from_target[p][grid.index(ts[k])],
            };
            total += leg.expect("targets share a component");
            prev = Some(k);
        }
        total += match prev {
            None => from_start[goal_idx],
            Some(p) => from_target[p][goal_idx],
        }
        .expect("goal shares a component");
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, order.clone()));
        }
        if !next_permutation(&mut order) {
            break;
        }
    }

    let (_, order) = best.expect("at least one ordering");
    let mut waypoints = vec![grid.start];
    waypoints.extend(order.iter().map(|&k| ts[k]));
    waypoints.push(grid.goal);
    let mut path = vec![grid.start];
    for w in waypoints.windows(2) {
        let leg = bfs_path(grid, w[0], w[1])?;
        path.extend_from_slice(&leg[1..]);
    }
    Ok(path)
}
