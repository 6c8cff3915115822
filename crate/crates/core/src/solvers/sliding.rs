use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::SolveError;

/// 3x3 board, row-major, `0` is the blank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PuzzleState(pub [u8; 9]);

/// Direction the blank moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlankMove {
    Up,
    Down,
    Left,
    Right,
}

impl BlankMove {
    pub const ALL: [BlankMove; 4] = [BlankMove::Up, BlankMove::Down, BlankMove::Left, BlankMove::Right];
}

const FACT: [usize; 9] = [1, 1, 2, 6, 24, 120, 720, 5040, 40320];
const STATES: usize = 362_880;
const UNREACHED: u8 = u8::MAX;

impl PuzzleState {
    pub const GOAL: PuzzleState = PuzzleState([1, 2, 3, 4, 5, 6, 7, 8, 0]);

    pub fn new(tiles: [u8; 9]) -> Result<Self, SolveError> {
        let mut seen = [false; 9];
        for &t in &tiles {
            if t > 8 || seen[t as usize] {
                return Err(SolveError::InvalidInput(format!("{tiles:?} is not a permutation of 0..=8")));
            }
            seen[t as usize] = true;
        }
        Ok(PuzzleState(tiles))
    }

    pub fn blank(&self) -> usize {
        self.0.iter().position(|&t| t == 0).expect("board has a blank")
    }

    /// Inversions among the numbered tiles; even means reachable from the goal.
    pub fn inversions(&self) -> usize {
        let tiles: Vec<u8> = self.0.iter().copied().filter(|&t| t != 0).collect();
        let mut inv = 0;
        for i in 0..tiles.len() {
            for j in i + 1..tiles.len() {
                if tiles[i] > tiles[j] {
                    inv += 1;
                }
            }
        }
        inv
    }

    pub fn is_solvable(&self) -> bool {
        self.inversions() % 2 == 0
    }

    pub fn apply(&self, m: BlankMove) -> Option<PuzzleState> {
        let b = self.blank();
        let (r, c) = (b / 3, b % 3);
        let t = match m {
            BlankMove::Up if r > 0 => b - 3,
            BlankMove::Down if r < 2 => b + 3,
            BlankMove::Left if c > 0 => b - 1,
            BlankMove::Right if c < 2 => b + 1,
            _ => return None,
        };
        let mut next = self.0;
        next.swap(b, t);
        Some(PuzzleState(next))
    }

    /// Lehmer rank in `0..9!`.
    pub fn rank(&self) -> usize {
        let mut r = 0;
        for i in 0..9 {
            let smaller = self.0[i + 1..].iter().filter(|&&t| t < self.0[i]).count();
            r += smaller * FACT[8 - i];
        }
        r
    }

    pub fn unrank(mut r: usize) -> PuzzleState {
        let mut pool: Vec<u8> = (0..9).collect();
        let mut out = [0u8; 9];
        for (i, slot) in out.iter_mut().enumerate() {
            let f = FACT[8 - i];
            *slot = pool.remove(r / f);
            r %= f;
        }
        PuzzleState(out)
    }

    /// Optimal move count to the goal, or `None` for odd parity.
    pub fn distance(&self) -> Option<u32> {
        match distance_table()[self.rank()] {
            UNREACHED => None,
            d => Some(d as u32),
        }
    }

    /// All solvable boards exactly `d` optimal moves from the goal, in rank order.
    pub fn at_distance(d: u32) -> Vec<PuzzleState> {
        by_distance().get(d as usize).map(|v| v.iter().map(|&r| PuzzleState::unrank(r as usize)).collect()).unwrap_or_default()
    }

    pub fn count_at_distance(d: u32) -> usize {
        by_distance().get(d as usize).map_or(0, Vec::len)
    }

    /// Boards visited by `moves`, starting with `self`.
    pub fn replay(&self, moves: &[BlankMove]) -> Result<Vec<PuzzleState>, SolveError> {
        let mut out = vec![*self];
        for (i, m) in moves.iter().enumerate() {
            let next = out.last().unwrap().apply(*m).ok_or_else(|| SolveError::InvalidInput(format!("move {i} ({m:?}) leaves the board")))?;
            out.push(next);
        }
        Ok(out)
    }
}

impl fmt::Display for PuzzleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..3 {
            let row = &self.0[r * 3..r * 3 + 3];
            writeln!(f, "{} {} {}", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

fn distance_table() -> &'static [u8] {
    static TABLE: OnceLock<Vec<u8>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut dist = vec![UNREACHED; STATES];
        dist[PuzzleState::GOAL.rank()] = 0;
        let mut q = VecDeque::from([PuzzleState::GOAL]);
        while let Some(s) = q.pop_front() {
            let d = dist[s.rank()];
            for m in BlankMove::ALL {
                if let Some(n) = s.apply(m) {
                    let r = n.rank();
                    if dist[r] == UNREACHED {
                        dist[r] = d + 1;
                        q.push_back(n);
                    }
                }
            }
        }
        dist
    })
}

fn by_distance() -> &'static [Vec<u32>] {
    static INDEX: OnceLock<Vec<Vec<u32>>> = OnceLock::new();
    INDEX.get_or_init(|| {
        let mut out: Vec<Vec<u32>> = Vec::new();
        for (r, &d) in distance_table().iter().enumerate() {
            if d != UNREACHED {
                if out.len() <= d as usize {
                    out.resize(d as usize + 1, Vec::new());
                }
                out[d as usize].push(r as u32);
            }
        }
        out
    })
}

/// Optimal blank moves to the goal. Each step takes the first of up, down,
/// left, right that lowers the remaining distance.
pub fn solve_sliding(p: &PuzzleState) -> Result<Vec<BlankMove>, SolveError> {
    PuzzleState::new(p.0)?;
    if !p.is_solvable() {
        return Err(SolveError::Unsolvable);
    }
    let table = distance_table();
    let mut cur = *p;
    let mut moves = Vec::new();
    while table[cur.rank()] != 0 {
        let d = table[cur.rank()];
        let (m, next) = BlankMove::ALL
            .iter()
            .filter_map(|&m| cur.apply(m).map(|n| (m, n)))
            .find(|(_, n)| table[n.rank()] == d - 1)
            .expect("a neighbour one move closer exists");
        moves.push(m);
        cur = next;
    }
    Ok(moves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solved_needs_no_moves() {
        assert!(solve_sliding(&PuzzleState::GOAL).unwrap().is_empty());
    }

    #[test]
    fn one_slide() {
        let p = PuzzleState::GOAL.apply(BlankMove::Left).unwrap();
        assert_eq!(solve_sliding(&p).unwrap(), vec![BlankMove::Right]);
    }

    #[test]
    fn odd_parity_rejected() {
        let p = PuzzleState([2, 1, 3, 4, 5, 6, 7, 8, 0]);
        assert_eq!(solve_sliding(&p), Err(SolveError::Unsolvable));
    }

    #[test]
    fn rank_round_trip() {
        for r in [0, 1, 4000, 181_439, 362_879] {
            assert_eq!(PuzzleState::unrank(r).rank(), r);
        }
    }

    #[test]
    fn reachable_space_size() {
        let reachable = distance_table().iter().filter(|&&d| d != UNREACHED).count();
        assert_eq!(reachable, 181_440);
        assert_eq!(by_distance().len() - 1, 31);
    }

    #[test]
    fn solution_replays_to_goal() {
        let p = PuzzleState::at_distance(12)[7];
        let moves = solve_sliding(&p).unwrap();
        assert_eq!(moves.len(), 12);
        assert_eq!(*p.replay(&moves).unwrap().last().unwrap(), PuzzleState::GOAL);
    }
}
