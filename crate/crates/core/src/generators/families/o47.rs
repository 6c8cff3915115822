//! 3x3 sliding puzzle solved in a prescribed number of moves.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::super::common::*;
use super::super::{FamilySpec, GenError, Stratum, TaskFamily};
use crate::render::{glyph_size, Animation, Element, ElementTrack, Rgb, SceneSpec, Shape, TrackAnimation};
use crate::sample::{ParamAssignment, ParamValue, State, Trajectory};
use crate::solvers::{solve_sliding, PuzzleState};

pub const TILE: f64 = 120.0;
pub const ORIGIN: f64 = 76.0;
pub const BOARD_COLOR: Rgb = LIGHT_GRAY;
pub const LABEL_SCALE: u32 = 6;
const TILE_INSET: f64 = 3.0;

/// Top-left pixel of board position `pos` (row-major).
pub fn slot_origin(pos: usize) -> [f64; 2] {
    [ORIGIN + (pos % 3) as f64 * TILE, ORIGIN + (pos / 3) as f64 * TILE]
}

#[derive(Clone, Debug)]
pub struct Layout {
    pub start: PuzzleState,
    pub moves: u32,
    /// Color of tile `t` at index `t - 1`.
    pub colors: Vec<Rgb>,
}

impl Layout {
    pub fn from_params(p: &ParamAssignment) -> Result<Self, GenError> {
        let t = p.ints("tiles")?;
        let tiles: [u8; 9] = t.iter().map(|&v| v as u8).collect::<Vec<_>>().try_into().map_err(|_| GenError::Config("board needs 9 tiles".into()))?;
        let colors = p
            .texts("tile_colors")?
            .iter()
            .map(|n| color(n).ok_or_else(|| GenError::Config(format!("unknown color {n}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if colors.len() != 8 {
            return Err(GenError::Config("need 8 tile colors".into()));
        }
        Ok(Layout { start: PuzzleState::new(tiles)?, moves: p.int("moves")? as u32, colors })
    }

    pub fn tile_position(board: &[u8; 9], tile: u8) -> usize {
        board.iter().position(|&t| t == tile).expect("tile on board")
    }
}

fn board(s: &State) -> Option<[u8; 9]> {
    match s {
        State::Board { tiles } => Some(*tiles),
        _ => None,
    }
}

/// Legal iff exactly the blank and one orthogonal neighbour swap places.
pub fn is_single_slide(a: &[u8; 9], b: &[u8; 9]) -> bool {
    let Ok(pa) = PuzzleState::new(*a) else { return false };
    crate::solvers::BlankMove::ALL.iter().any(|m| pa.apply(*m).map(|n| n.0) == Some(*b))
}

pub struct O47 {
    spec: FamilySpec,
}

impl O47 {
    pub fn new(spec: FamilySpec) -> Self {
        Self { spec }
    }
}

impl TaskFamily for O47 {
    fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    fn draw(&self, rng: &mut ChaCha8Rng, st: Stratum<'_>) -> Result<Option<ParamAssignment>, GenError> {
        let n = st.pick(rng, "moves")?;
        let pool = PuzzleState::at_distance(n as u32);
        if pool.is_empty() {
            return Ok(None);
        }
        let start = pool[rng.gen_range(0..pool.len())];
        let mut colors: Vec<String> = PALETTE.iter().map(|(n, _)| n.to_string()).collect();
        colors.shuffle(rng);
        colors.truncate(8);
        let mut p = ParamAssignment::new(st.index);
        p.set("moves", ParamValue::Int(n))
            .set("tiles", ParamValue::Ints(start.0.iter().map(|&t| t as i64).collect()))
            .set("tile_colors", ParamValue::Texts(colors));
        Ok(Some(p))
    }

    fn scene(&self, p: &ParamAssignment) -> Result<SceneSpec, GenError> {
        let l = Layout::from_params(p)?;
        let mut s = SceneSpec::new(Rgb::WHITE);
        s.push(Element::filled("board", Shape::Rect { x: ORIGIN, y: ORIGIN, w: 3.0 * TILE, h: 3.0 * TILE }, BOARD_COLOR, 0));
        let (gw, gh) = glyph_size("8", LABEL_SCALE);
        for t in 1..=8u8 {
            let [x, y] = slot_origin(Layout::tile_position(&l.start.0, t));
            let rect = Shape::Rect { x: x + TILE_INSET, y: y + TILE_INSET, w: TILE - 2.0 * TILE_INSET, h: TILE - 2.0 * TILE_INSET };
            s.push(Element::filled(format!("tile-{t}"), rect, l.colors[t as usize - 1], 1));
            let glyph = Shape::Glyph {
                text: t.to_string(),
                x: x + ((TILE - gw as f64) / 2.0).floor(),
                y: y + ((TILE - gh as f64) / 2.0).floor(),
                scale: LABEL_SCALE,
            };
            s.push(Element::filled(format!("label-{t}"), glyph, Rgb::BLACK, 2));
        }
        Ok(s)
    }

    fn solve(&self, p: &ParamAssignment) -> Result<Trajectory, GenError> {
        let l = Layout::from_params(p)?;
        let boards = l.start.replay(&solve_sliding(&l.start)?)?;
        Ok(Trajectory::new(boards.into_iter().map(|b| State::Board { tiles: b.0 }).collect(), self.spec.frames_per_step))
    }

    fn check_solution(&self, p: &ParamAssignment, t: &Trajectory) -> Result<(), String> {
        let l = Layout::from_params(p).map_err(|e| e.to_string())?;
        let boards: Vec<[u8; 9]> = t.states.iter().map(board).collect::<Option<_>>().ok_or("states are not boards")?;
        if boards.first() != Some(&l.start.0) {
            return Err("trajectory does not start from the scrambled board".into());
        }
        if boards.last() != Some(&PuzzleState::GOAL.0) {
            return Err("trajectory does not end solved".into());
        }
        if let Some(k) = boards.windows(2).position(|w| !is_single_slide(&w[0], &w[1])) {
            return Err(format!("move {k} is not a single slide into the blank"));
        }
        if boards.len() - 1 != l.moves as usize || l.start.distance() != Some(l.moves) {
            return Err(format!("{} moves, expected {}", boards.len() - 1, l.moves));
        }
        Ok(())
    }

    fn animation(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Box<dyn Animation + '_>, GenError> {
        let l = Layout::from_params(p)?;
        let boards: Vec<[u8; 9]> = t.states.iter().map(board).collect::<Option<_>>().ok_or_else(|| GenError::Config("O-47 states must be boards".into()))?;
        if let Some(b) = boards.iter().find(|b| PuzzleState::new(**b).is_err()) {
            return Err(GenError::Config(format!("{b:?} is not a board")));
        }
        let mut anim = TrackAnimation::new(self.scene(p)?, boards.len());
        for t in 1..=8u8 {
            let home = slot_origin(Layout::tile_position(&l.start.0, t));
            let pts: Vec<[f64; 2]> = boards.iter().map(|b| slot_origin(Layout::tile_position(b, t))).collect();
            let o = offsets(&pts, home);
            anim = anim.track(ElementTrack::moving(format!("tile-{t}"), o.clone())).track(ElementTrack::moving(format!("label-{t}"), o));
        }
        Ok(Box::new(anim))
    }

    fn prompt_fields(&self, p: &ParamAssignment) -> Result<BTreeMap<String, String>, GenError> {
        Ok([("moves".to_string(), p.int("moves")?.to_string())].into())
    }

    fn salient(&self, _p: &ParamAssignment) -> Vec<String> {
        (1..=8).map(|t| format!("tile-{t}")).collect()
    }

    /// After solving, swaps tiles 1 and 2 directly.
    fn violating_trajectory(&self, _p: &ParamAssignment, t: &Trajectory) -> Result<Trajectory, GenError> {
        let mut states = t.states.clone();
        let mut last = board(states.last().ok_or_else(|| GenError::Config("empty trajectory".into()))?)
            .ok_or_else(|| GenError::Config("O-47 states must be boards".into()))?;
        let (a, b) = (Layout::tile_position(&last, 1), Layout::tile_position(&last, 2));
        last.swap(a, b);
        states.push(State::Board { tiles: last });
        Ok(Trajectory::new(states, t.frames_per_step))
    }
}
