//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use vrsuite_core::solvers::{Cell, DirectedGraph, Grid};

/// Shortest simple path length by iterative-deepening DFS over all paths.
pub fn grid_oracle(rows: i32, cols: i32, blocked: &[Vec<bool>], start: (i32, i32), goal: (i32, i32)) -> Option<usize> {
    fn dfs(rows: i32, cols: i32, blocked: &[Vec<bool>], at: (i32, i32), goal: (i32, i32), left: usize, seen: &mut Vec<Vec<bool>>) -> bool {
        if at == goal {
            return true;
        }
        let remaining = (at.0 - goal.0).unsigned_abs() as usize + (at.1 - goal.1).unsigned_abs() as usize;
        if remaining > left {
            return false;
        }
        for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            let (r, c) = (at.0 + dr, at.1 + dc);
            if r < 0 || c < 0 || r >= rows || c >= cols || blocked[r as usize][c as usize] || seen[r as usize][c as usize] {
                continue;
            }
            seen[r as usize][c as usize] = true;
            let ok = dfs(rows, cols, blocked, (r, c), goal, left - 1, seen);
            seen[r as usize][c as usize] = false;
            if ok {
                return true;
            }
        }
        false
    }
    if blocked[goal.0 as usize][goal.1 as usize] {
        return None;
    }
    for depth in 0..(rows * cols) as usize {
        let mut seen = vec![vec![false; cols as usize]; rows as usize];
        seen[start.0 as usize][start.1 as usize] = true;
        if dfs(rows, cols, blocked, start, goal, depth, &mut seen) {
            return Some(depth);
        }
    }
    None
}

pub struct GridCase {
    pub rows: i32,
    pub cols: i32,
    pub blocked: Vec<Vec<bool>>,
    pub start: (i32, i32),
    pub goal: (i32, i32),
}

impl GridCase {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let (rows, cols) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let density = rng.gen_range(0.0..0.45);
        let mut blocked: Vec<Vec<bool>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_bool(density)).collect()).collect();
        let start = (rng.gen_range(0..rows), rng.gen_range(0..cols));
        let goal = (rng.gen_range(0..rows), rng.gen_range(0..cols));
        blocked[start.0 as usize][start.1 as usize] = false;
        GridCase { rows, cols, blocked, start, goal }
    }

    pub fn grid(&self) -> Grid {
        let mut cells = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.blocked[r as usize][c as usize] {
                    cells.push(Cell::new(r, c));
                }
            }
        }
        Grid::new(self.rows, self.cols, cells, Cell::new(self.start.0, self.start.1), Cell::new(self.goal.0, self.goal.1)).unwrap()
    }

    pub fn oracle(&self) -> Option<usize> {
        grid_oracle(self.rows, self.cols, &self.blocked, self.start, self.goal)
    }
}

/// Minimum hops over every simple directed path.
pub fn digraph_oracle(n: usize, edges: &[(usize, usize)], start: usize, goal: usize) -> Option<usize> {
    fn go(n: usize, edges: &[(usize, usize)], at: usize, goal: usize, used: &mut Vec<bool>, len: usize, best: &mut Option<usize>) {
        if at == goal {
            *best = Some(best.map_or(len, |b| b.min(len)));
            return;
        }
        for &(a, b) in edges {
            if a == at && !used[b] {
                used[b] = true;
                go(n, edges, b, goal, used, len + 1, best);
                used[b] = false;
            }
        }
    }
    let mut used = vec![false; n];
    used[start] = true;
    let mut best = None;
    go(n, edges, start, goal, &mut used, 0, &mut best);
    best
}

pub fn random_digraph(rng: &mut ChaCha8Rng) -> DirectedGraph {
    let n = rng.gen_range(2..=8);
    let positions: Vec<[f64; 2]> = (0..n).map(|i| {
        let a = i as f64 * std::f64::consts::TAU / n as f64;
        [256.0 + 200.0 * a.cos(), 256.0 + 200.0 * a.sin()]
    }).collect();
    let p = rng.gen_range(0.1..0.5);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    let start = rng.gen_range(0..n);
    let goal = (start + rng.gen_range(1..n)) % n;
    DirectedGraph::new(positions, edges, start, goal, 0.0).unwrap()
}

fn slide_neighbors(b: [u8; 9]) -> Vec<[u8; 9]> {
    let z = b.iter().position(|&t| t == 0).unwrap();
    let (r, c) = (z / 3, z % 3);
    let mut out = Vec::new();
    for (dr, dc) in [(-1i32, 0i32), (1, 0), (0, -1), (0, 1)] {
        let (nr, nc) = (r as i32 + dr, c as i32 + dc);
        if (0..3).contains(&nr) && (0..3).contains(&nc) {
            let mut n = b;
            n.swap(z, (nr * 3 + nc) as usize);
            out.push(n);
        }
    }
    out
}

/// Breadth-first distance to the solved board.
pub fn sliding_oracle(start: [u8; 9]) -> Option<usize> {
    const GOAL: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 0];
    let mut dist = HashMap::from([(start, 0usize)]);
    let mut q = VecDeque::from([start]);
    while let Some(b) = q.pop_front() {
        let d = dist[&b];
        if b == GOAL {
            return Some(d);
        }
        for n in slide_neighbors(b) {
            dist.entry(n).or_insert_with(|| {
                q.push_back(n);
                d + 1
            });
        }
    }
    None
}

/// Random walk of `moves` slides from the solved board.
pub fn scramble(rng: &mut ChaCha8Rng, moves: usize) -> [u8; 9] {
    let mut b = [1, 2, 3, 4, 5, 6, 7, 8, 0];
    for _ in 0..moves {
        let n = slide_neighbors(b);
        b = n[rng.gen_range(0..n.len())];
    }
    b
}
