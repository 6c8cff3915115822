//! Per-family scorers. Each returns `(dimension id, score)` pairs that are
//! matched against the family's registered rubric.

use std::collections::BTreeSet;

use super::efficiency::path_efficiency_score;
use super::extract::{agent_spec, color_region, static_fidelity, static_mask, track_agent, ExtractedTrajectory, COLOR_TOLERANCE};
use super::{Diagnostic, EvalError};
use crate::generators::common::{GridGeom, LIGHT_GRAY};
use crate::generators::families::{g15, g16, g3, g31, g35, g45, o47, o49, o85};
use crate::render::{Frame, Rgb};
use crate::sample::{ParamAssignment, State, Trajectory};
use crate::solvers::{Cell, PuzzleState};

pub(crate) struct Ctx<'a> {
    pub params: &'a ParamAssignment,
    pub solution: &'a Trajectory,
    pub reference: &'a [Frame],
    pub candidate: &'a [Frame],
    pub diagnostics: Vec<Diagnostic>,
}

pub(crate) type Scores = Vec<(&'static str, f64)>;

impl Ctx<'_> {
    fn note(&mut self, frame: Option<usize>, msg: impl Into<String>) {
        self.diagnostics.push(Diagnostic { frame, message: msg.into() });
    }

    fn track(&mut self, task: &str) -> Result<ExtractedTrajectory, EvalError> {
        let spec = agent_spec(task, self.params).ok_or_else(|| EvalError::Manifest(format!("{task} parameters do not describe an agent")))?;
        let t = track_agent(self.candidate, &spec);
        self.diagnostics.extend(t.diagnostics.iter().cloned());
        Ok(t)
    }

    fn fps(&self) -> f64 {
        self.solution.frames_per_step.max(1) as f64
    }

    /// Reproduction of the never-changing non-background pixels.
    fn fidelity(&self) -> f64 {
        let Some(first) = self.reference.first() else { return 0.0 };
        static_fidelity(first, &static_mask(self.reference, Rgb::WHITE), self.candidate)
    }

    fn first_detection_frame(&self, t: &ExtractedTrajectory, s: &State) -> Option<usize> {
        t.detections.iter().find(|d| d.quantized.as_ref() == Some(s)).map(|d| d.frame)
    }
}

/// Fraction of steps between 4-adjacent open cells; 0 without any step.
fn step_legality(cells: &[Cell], open: impl Fn(Cell) -> bool) -> f64 {
    if cells.len() < 2 {
        return 0.0;
    }
    let ok = cells.windows(2).filter(|w| w[0].is_adjacent(w[1]) && open(w[0]) && open(w[1])).count();
    ok as f64 / (cells.len() - 1) as f64
}

fn grid_smooth_limit(g: &GridGeom, fps: f64) -> f64 {
    1.5 * g.cell / fps
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Fraction of pixels in the rectangle matching `color`.
fn region_fraction(f: &Frame, x0: f64, y0: f64, x1: f64, y1: f64, color: Rgb) -> f64 {
    let (xa, ya) = (x0.max(0.0).ceil() as u32, y0.max(0.0).ceil() as u32);
    let (xb, yb) = ((x1.floor() as u32).min(f.width()), (y1.floor() as u32).min(f.height()));
    if xb <= xa || yb <= ya {
        return 0.0;
    }
    let mut hit = 0usize;
    for y in ya..yb {
        for x in xa..xb {
            hit += f.get(x, y).matches(color, COLOR_TOLERANCE) as usize;
        }
    }
    hit as f64 / ((xb - xa) * (yb - ya)) as f64
}

fn cell_fraction(f: &Frame, g: &GridGeom, c: Cell, inset: f64, color: Rgb) -> f64 {
    let x = g.x0 + c.col as f64 * g.cell;
    let y = g.y0 + c.row as f64 * g.cell;
    region_fraction(f, x + inset, y + inset, x + g.cell - inset, y + g.cell - inset, color)
}

pub(crate) fn g15(cx: &mut Ctx) -> Result<Scores, EvalError> {
    let l = g15::Layout::from_params(cx.params)?;
    let t = cx.track("G-15")?;
    let cells = t.cells();
    let usable = !t.failed() && !cells.is_empty();
    let mut avoidance = usable as u8 as f64;
    if let Some(c) = cells.iter().find(|c| l.obstacles.contains(c)) {
        avoidance = 0.0;
        let f = cx.first_detection_frame(&t, &State::cell(*c));
        cx.note(f, format!("agent enters obstacle cell ({}, {})", c.row, c.col));
    }
    let reached = usable && cells.first() == Some(&l.start) && cells.last() == Some(&l.goal);
    let optimality = if reached { path_efficiency_score(cells.len() - 1, cx.solution.steps()).score } else { 0.0 };
    let n = l.n;
    let legal = step_legality(&cells, |c| c.row >= 0 && c.col >= 0 && c.row < n && c.col < n);
    let motion = legal * t.smooth_fraction(grid_smooth_limit(&l.geom, cx.fps()));
    Ok(vec![("obstacle_avoidance", avoidance), ("path_optimality", optimality), ("motion_compliance", motion), ("task_completion", reached as u8 as f64)])
}

pub(crate) fn g16(cx: &mut Ctx) -> Result<Scores, EvalError> {
    let l = g16::Layout::from_params(cx.params)?;
    let t = cx.track("G-16")?;
    let cells = t.cells();
    let usable = !t.failed() && !cells.is_empty();
    let visited: BTreeSet<Cell> = cells.iter().copied().collect();
    let covered = l.targets.iter().filter(|c| visited.contains(c)).count();
    let mut coverage = if usable { covered as f64 / l.targets.len().max(1) as f64 } else { 0.0 };
    if let Some(last) = cx.candidate.last() {
        let inset = (l.geom.cell * 0.12).floor() + 1.0;
        let missing = l.targets.iter().filter(|c| cell_fraction(last, &l.geom, **c, inset, g16::TARGET_COLOR) < 0.25).count();
        if missing > 0 {
            coverage *= 0.5;
            cx.note(Some(cx.candidate.len() - 1), format!("{missing} target block(s) missing from the final frame"));
        }
    }
    let complete = usable && covered == l.targets.len() && cells.first() == Some(&l.start) && cells.last() == Some(&l.goal);
    let route = if complete { path_efficiency_score(cells.len() - 1, cx.solution.steps()).score } else { 0.0 };
    let n = l.n;
    let legal = step_legality(&cells, |c| c.row >= 0 && c.col >= 0 && c.row < n && c.col < n);
    let legality = legal * t.smooth_fraction(grid_smooth_limit(&l.geom, cx.fps()));
    Ok(vec![("target_coverage", coverage), ("route_optimality", route), ("task_completion", complete as u8 as f64), ("motion_legality", legality)])
}

pub(crate) fn g31(cx: &mut Ctx) -> Result<Scores, EvalError> {
    let l = g31::Layout::from_params(cx.params)?;
    let g = &l.graph;
    let t = cx.track("G-31")?;
    let nodes = t.nodes();
    let usable = !t.failed() && nodes.len() >= 2;
    let reached = usable && nodes.first() == Some(&g.start) && nodes.last() == Some(&g.goal);
    let shortest = if reached { path_efficiency_score(nodes.len() - 1, cx.solution.steps()).score } else { 0.0 };
    let mut direction = usable as u8 as f64;
    let mut along = 0usize;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        if g.has_edge(a, b) || g.has_edge(b, a) {
            along += 1;
        }
        if !g.has_edge(a, b) && g.has_edge(b, a) {
            direction = 0.0;
            let f = cx.first_detection_frame(&t, &State::Node { id: b });
            cx.note(f, format!("hop {a} -> {b} runs against the arrow"));
        }
    }
    let longest = g.edges.iter().map(|&(a, b)| dist(g.positions[a], g.positions[b])).fold(0.0, f64::max);
    let legality = if usable { along as f64 / (nodes.len() - 1) as f64 * t.smooth_fraction(1.5 * longest / cx.fps()) } else { 0.0 };
    Ok(vec![("shortest_path", shortest), ("direction_compliance", direction), ("motion_legality", legality), ("graph_fidelity", cx.fidelity())])
}

pub(crate) fn g45(cx: &mut Ctx) -> Result<Scores, EvalError> {
    let l = g45::Layout::from_params(cx.params)?;
    let t = cx.track("G-45")?;
    let cells = t.cells();
    let usable = !t.failed() && cells.len() >= 2;
    let (key, door) = (l.key(), l.door());
    let key_at = cells.iter().position(|c| *c == key).filter(|_| usable);
    let door_at = key_at.and_then(|k| cells[k..].iter().position(|c| *c == door).map(|d| d + k));
    let mut identification = 0.5 * key_at.is_some() as u8 as f64 + 0.5 * door_at.is_some() as u8 as f64;
    let distractors = l.distractors();
    if let Some(d) = cells.iter().find(|c| distractors.contains(c)) {
        identification *= 0.5;
        let f = cx.first_detection_frame(&t, &State::cell(*d));
        cx.note(f, format!("agent visits distractor ({}, {})", d.row, d.col));
    }
    let tiles = l.tiles;
    let validity = if let Some(w) = cells.iter().find(|c| l.walls.contains(c)) {
        let f = cx.first_detection_frame(&t, &State::cell(*w));
        cx.note(f, format!("agent enters wall tile ({}, {})", w.row, w.col));
        0.0
    } else {
        step_legality(&cells, |c| c.row >= 0 && c.col >= 0 && c.row < tiles && c.col < tiles)
    };
    let efficiency = match door_at {
        Some(d) => path_efficiency_score(d, cx.solution.steps()).score,
        None => 0.0,
    };
    let smooth = t.smooth_fraction(grid_smooth_limit(&l.geom, cx.fps()));
    let aligned = t.last_centroid().is_some_and(|p| dist(p, l.geom.center(door)) <= 0.3 * l.geom.cell) as u8 as f64;
    let key_color = crate::generators::common::named(&l.colors[l.target]);
    let pickup = match cx.candidate.last() {
        Some(last) if cell_fraction(last, &l.geom, key, l.geom.cell * 0.3, key_color) > 0.25 => 0.5,
        _ => 1.0,
    };
    Ok(vec![("target_identification", identification), ("path_validity", validity), ("path_efficiency", efficiency), ("animation_quality", smooth * aligned * pickup)])
}

/// Per-frame object boxes for G-3, keyed by object; `None` when the object
/// is missing or too occluded to trust.
fn g3_positions(frame: &Frame, objects: &[crate::solvers::SortObject], expected: &[f64]) -> Vec<Option<[f64; 2]>> {
    objects
        .iter()
        .zip(expected)
        .map(|(o, &e)| {
            let r = color_region(frame, Rgb(o.color[0], o.color[1], o.color[2]))?;
            (r.pixels as f64 >= 0.9 * e).then(|| r.bbox_center())
        })
        .collect()
}

fn std_dev(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

pub(crate) fn g3(cx: &mut Ctx) -> Result<Scores, EvalError> {
    let l = g3::Layout::from_params(cx.params)?;
    let targets = l.targets()?;
    let n = l.objects.len();
    let rgb = |i: usize| Rgb(l.objects[i].color[0], l.objects[i].color[1], l.objects[i].color[2]);
    let expected: Vec<f64> = match cx.reference.first() {
        Some(f) => (0..n).map(|i| color_region(f, rgb(i)).map_or(1.0, |r| r.pixels as f64)).collect(),
        None => vec![1.0; n],
    };
    let Some(last) = cx.candidate.last() else {
        return Ok(vec![("classification", 0.0), ("ordering", 0.0), ("object_fidelity", 0.0), ("layout", 0.0)]);
    };
    let fin = g3_positions(last, &l.objects, &expected);
    let found: Vec<usize> = (0..n).filter(|&i| fin[i].is_some()).collect();
    let mut by_x = found.clone();
    by_x.sort_by(|&a, &b| fin[a].unwrap()[0].total_cmp(&fin[b].unwrap()[0]));
    let switches = by_x.windows(2).filter(|w| w[0] / 3 != w[1] / 3).count();
    let mut classification = found.len() as f64 / n as f64;
    if switches > 1 {
        classification *= 0.5;
        cx.note(Some(cx.candidate.len() - 1), "shape groups are interleaved");
    }
    // Adjacent pairs within each group, in target order.
    let mut pairs = Vec::new();
    for grp in 0..2 {
        let mut members: Vec<usize> = (3 * grp..3 * grp + 3).collect();
        members.sort_by(|&a, &b| targets[a][0].total_cmp(&targets[b][0]));
        pairs.extend(members.windows(2).map(|w| (w[0], w[1])));
    }
    let ordered = pairs.iter().filter(|(a, b)| matches!((fin[*a], fin[*b]), (Some(pa), Some(pb)) if pa[0] < pb[0])).count();
    let ordering = ordered as f64 / pairs.len() as f64;

    let area = (0..n)
        .map(|i| color_region(last, rgb(i)).map_or(0.0, |r| (r.pixels as f64).min(expected[i]) / (r.pixels as f64).max(expected[i])))
        .sum::<f64>()
        / n as f64;
    let fps = cx.fps();
    let mut max_step: f64 = 0.0;
    for w in cx.solution.states.windows(2) {
        if let (State::Arrangement { centers: a }, State::Arrangement { centers: b }) = (&w[0], &w[1]) {
            for (p, q) in a.iter().zip(b) {
                max_step = max_step.max(dist(*p, *q) / fps);
            }
        }
    }
    let limit = 1.5 * max_step + 1.0;
    let tracks: Vec<Vec<Option<[f64; 2]>>> = cx.candidate.iter().map(|f| g3_positions(f, &l.objects, &expected)).collect();
    let (mut good, mut total) = (0usize, 0usize);
    for (k, w) in tracks.windows(2).enumerate() {
        let moves: Vec<f64> = (0..n).filter_map(|i| Some(dist(w[0][i]?, w[1][i]?))).filter(|d| *d > 1.0).collect();
        total += 1;
        if moves.len() <= 1 && moves.iter().all(|d| *d <= limit) {
            good += 1;
        } else if cx.diagnostics.len() < 32 {
            cx.note(Some(k + 1), format!("{} object(s) move, largest jump {:.1} px", moves.len(), moves.iter().fold(0.0f64, |a, b| a.max(*b))));
        }
    }
    let continuity = if total == 0 { 0.0 } else { good as f64 / total as f64 };

    let layout = if found.len() < 2 {
        0.0
    } else {
        let ys: Vec<f64> = found.iter().map(|&i| fin[i].unwrap()[1]).collect();
        let xs: Vec<f64> = by_x.iter().map(|&i| fin[i].unwrap()[0]).collect();
        let gaps: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let spacing = if mean <= 0.0 { 0.0 } else { (1.0 - std_dev(&gaps) / mean / 0.5).max(0.0) };
        (1.0 - std_dev(&ys) / 20.0).max(0.0) * spacing
    };
    Ok(vec![("classification", classification), ("ordering", ordering), ("object_fidelity", area * continuity), ("layout", layout)])
}

/// Board read from a patch near each slot's corner, clear of labels and of
/// the gaps between tiles. `None` if any slot is unreadable or the result
/// is not a permutation.
pub fn read_board(frame: &Frame, colors: &[Rgb]) -> Option<[u8; 9]> {
    let mut tiles = [0u8; 9];
    for (pos, slot) in tiles.iter_mut().enumerate() {
        let [x, y] = o47::slot_origin(pos);
        let (x0, y0) = (x + 8.0, y + 8.0);
        let mut best = (0.0, None);
        for (label, c) in std::iter::once((0u8, LIGHT_GRAY)).chain(colors.iter().enumerate().map(|(i, c)| (i as u8 + 1, *c))) {
            let f = region_fraction(frame, x0, y0, x0 + 12.0, y0 + 12.0, c);
            if f > best.0 {
                best = (f, Some(label));
            }
        }
        if best.0 < 0.5 {
            return None;
        }
        *slot = best.1?;
    }
    PuzzleState::new(tiles).ok().map(|s| s.0)
}

pub(crate) fn o47(cx: &mut Ctx) -> Result<Scores, EvalError> {
    let l = o47::Layout::from_params(cx.params)?;
    let mut boards: Vec<[u8; 9]> = Vec::new();
    for f in cx.candidate {
        if let Some(b) = read_board(f, &l.colors) {
            if boards.last() != Some(&b) {
                boards.push(b);
            }
        }
    }
    if boards.is_empty() {
        cx.note(None, "no frame decodes to a valid board");
    }
    let goal = (boards.last() == Some(&PuzzleState::GOAL.0)) as u8 as f64;
    let expected = cx.solution.steps() as f64;
    let count = if boards.is_empty() { 0.0 } else { (1.0 - ((boards.len() - 1) as f64 - expected).abs() / 4.0).max(0.0) };
    let mut legal = boards.len() >= 2 && boards[0] == l.start.0;
    for (k, w) in boards.windows(2).enumerate() {
        if !o47::is_single_slide(&w[0], &w[1]) {
            legal = false;
            cx.note(None, format!("board change {} is not a single slide", k + 1));
        }
    }
    Ok(vec![("goal_state", goal), ("move_count", count), ("move_legality", legal as u8 as f64), ("layout_fidelity", cx.fidelity())])
}

/// Cell fills read at cell centres; 255 marks an unrecognised color.
pub fn read_fill(frame: &Frame, l: &o49::Layout) -> Vec<u8> {
    let w = l.cols();
    (0..l.rows * w)
        .map(|i| {
            let [x, y] = l.geom.center(Cell::new((i / w) as i32, (i % w) as i32));
            let px = frame.get((x as u32).min(frame.width() - 1), (y as u32).min(frame.height() - 1));
            if px.matches(Rgb::WHITE, COLOR_TOLERANCE) {
                0
            } else {
                l.colors.iter().position(|c| px.matches(*c, COLOR_TOLERANCE)).map_or(255, |k| k as u8 + 1)
            }
        })
        .collect()
}

pub(crate) fn o49(cx: &mut Ctx) -> Result<Scores, EvalError> {
    let l = o49::Layout::from_params(cx.params)?;
    let mut states: Vec<Vec<u8>> = Vec::new();
    for f in cx.candidate {
        let s = read_fill(f, &l);
        if states.last() != Some(&s) {
            states.push(s);
        }
    }
    let done = l.complete();
    let (w, h) = (l.cols(), l.half);
    let Some(fin) = states.last() else {
        return Ok(vec![("mirror_accuracy", 0.0), ("left_preservation", 0.0), ("reveal_process", 0.0), ("grid_fidelity", 0.0)]);
    };
    let right = |i: usize| i % w >= h;
    let mirror = (0..fin.len()).filter(|&i| right(i)).all(|i| fin[i] == done[i]) as u8 as f64;
    let left_cells: Vec<usize> = (0..fin.len()).filter(|&i| !right(i)).collect();
    let preserved = left_cells.iter().filter(|&&i| fin[i] == done[i]).count() as f64 / left_cells.len().max(1) as f64;
    let reveal = if states.len() < 2 {
        0.0
    } else {
        let ok = states
            .windows(2)
            .filter(|p| (0..p[0].len()).filter(|&i| p[0][i] != p[1][i]).all(|i| right(i) && p[0][i] == 0 && p[1][i] == done[i]))
            .count();
        ok as f64 / (states.len() - 1) as f64
    };
    Ok(vec![("mirror_accuracy", mirror), ("left_preservation", preserved), ("reveal_process", reveal), ("grid_fidelity", cx.fidelity())])
}

fn g35_axis_ok(prev: f64, next: f64, pos: f64, lo: f64, hi: f64, slack: f64) -> bool {
    (next - prev).abs() <= 1.0 || pos - lo <= slack || hi - pos <= slack
}

pub(crate) fn g35(cx: &mut Ctx) -> Result<Scores, EvalError> {
    let l = g35::Layout::from_params(cx.params)?;
    let w = &l.world;
    let t = cx.track("G-35")?;
    let mut pts: Vec<[f64; 2]> = t.detections.iter().map(|d| d.centroid).collect();
    // Drop the trailing hold; it carries no motion.
    while pts.len() >= 2 && dist(pts[pts.len() - 1], pts[pts.len() - 2]) < 0.5 {
        pts.pop();
    }
    let usable = !t.failed() && pts.len() >= 2;
    let hit = usable && t.last_centroid().is_some_and(|p| dist(p, w.target) <= w.target_radius + 1.0);
    let vel: Vec<[f64; 2]> = pts.windows(2).map(|p| [p[1][0] - p[0][0], p[1][1] - p[0][1]]).collect();
    let mut flips = 0usize;
    for axis in 0..2 {
        let signs: Vec<f64> = vel.iter().map(|v| v[axis]).filter(|d| d.abs() >= 0.5).map(f64::signum).collect();
        flips += signs.windows(2).filter(|s| s[0] != s[1]).count();
    }
    let bounce = if !usable {
        0.0
    } else {
        match flips.abs_diff(l.bounces) {
            0 => 1.0,
            1 => 0.5,
            _ => 0.0,
        }
    };
    let (lo, hi) = w.limits();
    let speed = w.velocity[0].hypot(w.velocity[1]);
    let mut physics = usable;
    for (k, v) in vel.windows(2).enumerate() {
        let at = pts[k + 1];
        if !(0..2).all(|a| g35_axis_ok(v[0][a], v[1][a], at[a], lo[a], hi[a], speed + 1.0)) {
            physics = false;
            cx.note(t.detections.get(k + 1).map(|d| d.frame), "velocity changes away from any wall");
            break;
        }
    }
    Ok(vec![("target_hit", hit as u8 as f64), ("bounce_count", bounce), ("physics", physics as u8 as f64), ("visual_fidelity", cx.fidelity())])
}

fn wrap_deg(d: f64) -> f64 {
    (d + 180.0).rem_euclid(360.0) - 180.0
}

pub(crate) fn o85(cx: &mut Ctx) -> Result<Scores, EvalError> {
    let l = o85::Layout::from_params(cx.params)?;
    let pivot = o85::PIVOT;
    let bearing = |p: [f64; 2]| (p[1] - pivot[1]).atan2(p[0] - pivot[0]).to_degrees();
    let start = bearing(l.marker);
    let ref_poly = cx.reference.first().and_then(|f| color_region(f, o85::POLY_COLOR));
    let mut angles: Vec<f64> = Vec::new();
    let (mut rigid, mut seen) = (0usize, 0usize);
    let mut cum = 0.0;
    let mut prev = start;
    for (k, f) in cx.candidate.iter().enumerate() {
        let Some(m) = color_region(f, o85::MARKER_COLOR) else { continue };
        let a = bearing(m.centroid);
        cum += wrap_deg(a - prev);
        prev = a;
        angles.push(cum);
        seen += 1;
        let ok = match (ref_poly, color_region(f, o85::POLY_COLOR)) {
            (Some(r), Some(p)) => {
                (p.pixels as f64 - r.pixels as f64).abs() <= 0.05 * r.pixels as f64 && (dist(p.centroid, pivot) - dist(r.centroid, pivot)).abs() <= 3.0
            }
            _ => false,
        };
        if ok {
            rigid += 1;
        } else if cx.diagnostics.len() < 32 {
            cx.note(Some(k), "polygon deforms or drifts off the pivot");
        }
    }
    if angles.len() * 2 <= cx.candidate.len() {
        cx.note(None, "marker missing in most frames");
        return Ok(vec![("final_angle", 0.0), ("direction", 0.0), ("rigidity", 0.0), ("smoothness", 0.0)]);
    }
    let total = *angles.last().unwrap();
    let err = wrap_deg(total - l.target_deg).abs();
    let final_angle = if err <= 5.0 { 1.0 } else { (1.0 - (err - 5.0) / 25.0).max(0.0) };
    let sign = l.target_deg.signum();
    let deltas: Vec<f64> = std::iter::once(angles[0]).chain(angles.windows(2).map(|w| w[1] - w[0])).collect();
    let direction = (total * sign >= 1.0 && deltas.iter().all(|d| d * sign >= -1.0)) as u8 as f64;
    let step = o85::STEP_DEG / cx.fps();
    let smooth = if deltas.len() < 2 { 0.0 } else { deltas[1..].iter().filter(|d| d.abs() <= 1.5 * step).count() as f64 / (deltas.len() - 1) as f64 };
    Ok(vec![("final_angle", final_angle), ("direction", direction), ("rigidity", rigid as f64 / seen.max(1) as f64), ("smoothness", smooth)])
}
