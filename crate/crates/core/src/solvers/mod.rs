//! Ground-truth solvers and simulators.
//!
//! Every solver is a pure function with a fixed tie-break order, so equal
//! inputs produce equal paths and therefore byte-identical videos.

mod bounce;
mod digraph;
mod grid;
mod layout;
mod sliding;

pub use bounce::{simulate_bounce, Bounce, BounceOutcome, BounceWorld, Wall};
pub use digraph::{digraph_shortest, DirectedGraph};
pub use grid::{bfs_distances, bfs_path, bfs_shortest, visit_all_shortest, Cell, Grid, MAX_VISIT_TARGETS};
pub use layout::{stable_sort_layout, SlotLayout, SortObject};
pub use sliding::{solve_sliding, BlankMove, PuzzleState};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("no path from start to goal")]
    NoPath,
    #[error("puzzle state has odd parity and cannot reach the goal")]
    Unsolvable,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
