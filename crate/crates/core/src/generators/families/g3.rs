//! Group shapes by type and line each group up by size.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::super::common::*;
use super::super::{FamilySpec, GenError, Stratum, TaskFamily};
use crate::render::{Animation, BBox, Element, ElementTrack, Rgb, SceneSpec, Shape, TrackAnimation};
use crate::sample::{ParamAssignment, ParamValue, State, Trajectory};
use crate::solvers::{stable_sort_layout, SlotLayout, SortObject};

pub const KINDS: [&str; 4] = ["circle", "square", "triangle", "diamond"];
pub const OBJECTS: usize = 6;
/// Initial centres stay clear of the band where the line is built.
pub const UPPER_MAX_Y: i64 = 181;
pub const LOWER_MIN_Y: i64 = 331;
const MARGIN: f64 = 8.0;

pub fn shape(kind: &str, size: f64, c: [f64; 2]) -> Shape {
    let h = size / 2.0;
    match kind {
        "circle" => Shape::Circle { cx: c[0], cy: c[1], r: h },
        "square" => Shape::Rect { x: c[0] - h, y: c[1] - h, w: size, h: size },
        "triangle" => Shape::Triangle { points: [[c[0], c[1] - h], [c[0] + h, c[1] + h], [c[0] - h, c[1] + h]] },
        _ => Shape::Diamond { cx: c[0], cy: c[1], half_w: h, half_h: h },
    }
}

#[derive(Clone, Debug)]
pub struct Layout {
    pub kinds: Vec<String>,
    pub objects: Vec<SortObject>,
    pub color_names: Vec<String>,
}

impl Layout {
    pub fn from_params(p: &ParamAssignment) -> Result<Self, GenError> {
        let kinds = p.texts("kinds")?.to_vec();
        let sizes = p.ints("sizes")?;
        let colors = p.texts("colors")?;
        let (xs, ys) = (p.ints("xs")?, p.ints("ys")?);
        if kinds.len() != 2 || [sizes.len(), colors.len(), xs.len(), ys.len()].iter().any(|&n| n != OBJECTS) {
            return Err(GenError::Config("G-3 needs 2 kinds and 6 objects".into()));
        }
        let objects = (0..OBJECTS)
            .map(|i| {
                let c = color(&colors[i]).ok_or_else(|| GenError::Config(format!("unknown color {}", colors[i])))?;
                Ok(SortObject { kind: kinds[i / 3].clone(), size: sizes[i] as u32, color: [c.0, c.1, c.2], position: [xs[i] as f64, ys[i] as f64] })
            })
            .collect::<Result<_, GenError>>()?;
        Ok(Layout { kinds, objects, color_names: colors.to_vec() })
    }

    pub fn targets(&self) -> Result<Vec<[f64; 2]>, GenError> {
        Ok(stable_sort_layout(&self.objects, SlotLayout::default())?)
    }

    pub fn initial(&self) -> Vec<[f64; 2]> {
        self.objects.iter().map(|o| o.position).collect()
    }

    /// One object per step, filling slots left to right.
    pub fn moves_to(&self, targets: &[[f64; 2]]) -> Vec<State> {
        let mut order: Vec<usize> = (0..OBJECTS).collect();
        order.sort_by(|&a, &b| targets[a][0].total_cmp(&targets[b][0]));
        let mut cur = self.initial();
        let mut states = vec![State::Arrangement { centers: cur.clone() }];
        for i in order {
            cur[i] = targets[i];
            states.push(State::Arrangement { centers: cur.clone() });
        }
        states
    }
}

fn arrangement(s: &State) -> Option<&[[f64; 2]]> {
    match s {
        State::Arrangement { centers } => Some(centers),
        _ => None,
    }
}

pub struct G3 {
    spec: FamilySpec,
}

impl G3 {
    pub fn new(spec: FamilySpec) -> Self {
        Self { spec }
    }
}

impl TaskFamily for G3 {
    fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    fn draw(&self, rng: &mut ChaCha8Rng, st: Stratum<'_>) -> Result<Option<ParamAssignment>, GenError> {
        let gap = st.pick(rng, "size_gap")?;
        let (lo, hi) = st.range("sizes")?;
        if lo + 2 * gap > hi {
            return Err(GenError::Config("size range too narrow for the gap".into()));
        }
        let kinds: Vec<String> = KINDS.choose_multiple(rng, 2).map(|s| s.to_string()).collect();
        let colors: Vec<String> = PALETTE.choose_multiple(rng, OBJECTS).map(|(n, _)| n.to_string()).collect();
        let mut sizes = Vec::with_capacity(OBJECTS);
        for _ in 0..2 {
            // The closest pair in each group differs by exactly `gap`.
            let s0 = rng.gen_range(lo..=hi - 2 * gap);
            let s1 = s0 + gap;
            let s2 = rng.gen_range(s1 + gap..=hi);
            let mut g = [s0, s1, s2];
            g.shuffle(rng);
            sizes.extend(g);
        }
        let mut boxes: Vec<BBox> = Vec::new();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (i, &s) in sizes.iter().enumerate() {
            let h = s as f64 / 2.0;
            let xr = (h + MARGIN).ceil() as i64..=(512.0 - h - MARGIN).floor() as i64;
            let upper = rng.gen_bool(0.5);
            let yr = if upper { (h + MARGIN).ceil() as i64..=UPPER_MAX_Y } else { LOWER_MIN_Y..=(512.0 - h - MARGIN).floor() as i64 };
            let (x, y) = (rng.gen_range(xr), rng.gen_range(yr));
            let b = shape(&kinds[i / 3], s as f64, [x as f64, y as f64]).bbox();
            let padded = BBox { x0: b.x0 - 6.0, y0: b.y0 - 6.0, x1: b.x1 + 6.0, y1: b.y1 + 6.0 };
            if boxes.iter().any(|o| o.intersection_area(&padded) > 0.0) {
                return Ok(None);
            }
            boxes.push(b);
            xs.push(x);
            ys.push(y);
        }
        let mut p = ParamAssignment::new(st.index);
        p.set("size_gap", ParamValue::Int(gap))
            .set("kinds", ParamValue::Texts(kinds))
            .set("sizes", ParamValue::Ints(sizes))
            .set("colors", ParamValue::Texts(colors))
            .set("xs", ParamValue::Ints(xs))
            .set("ys", ParamValue::Ints(ys));
        Ok(Some(p))
    }

    fn scene(&self, p: &ParamAssignment) -> Result<SceneSpec, GenError> {
        let l = Layout::from_params(p)?;
        let mut s = SceneSpec::new(Rgb::WHITE);
        for (i, o) in l.objects.iter().enumerate() {
            let c = Rgb(o.color[0], o.color[1], o.color[2]);
            s.push(Element::filled(format!("obj-{i}"), shape(&o.kind, o.size as f64, o.position), c, 1));
        }
        Ok(s)
    }

    fn solve(&self, p: &ParamAssignment) -> Result<Trajectory, GenError> {
        let l = Layout::from_params(p)?;
        Ok(Trajectory::new(l.moves_to(&l.targets()?), self.spec.frames_per_step))
    }

    fn check_solution(&self, p: &ParamAssignment, t: &Trajectory) -> Result<(), String> {
        let l = Layout::from_params(p).map_err(|e| e.to_string())?;
        let states: Vec<&[[f64; 2]]> = t.states.iter().map(arrangement).collect::<Option<_>>().ok_or("states are not arrangements")?;
        if states.iter().any(|s| s.len() != OBJECTS) {
            return Err("every arrangement must place six objects".into());
        }
        if states.first().copied() != Some(l.initial().as_slice()) {
            return Err("trajectory does not start from the initial layout".into());
        }
        let targets = l.targets().map_err(|e| e.to_string())?;
        let close = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).abs() <= 0.5 && (a[1] - b[1]).abs() <= 0.5;
        let last = states.last().expect("non-empty");
        if let Some(i) = (0..OBJECTS).find(|&i| !close(last[i], targets[i])) {
            return Err(format!("object {i} does not end in its sorted slot"));
        }
        for (k, w) in states.windows(2).enumerate() {
            let moved = (0..OBJECTS).filter(|&i| w[0][i] != w[1][i]).count();
            if moved != 1 {
                return Err(format!("step {k} moves {moved} objects"));
            }
        }
        if states.len() != OBJECTS + 1 {
            return Err(format!("{} moves, optimum is {OBJECTS}", states.len() - 1));
        }
        Ok(())
    }

    fn animation(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Box<dyn Animation + '_>, GenError> {
        let l = Layout::from_params(p)?;
        let states: Vec<&[[f64; 2]]> =
            t.states.iter().map(arrangement).collect::<Option<_>>().ok_or_else(|| GenError::Config("G-3 states must be arrangements".into()))?;
        let mut anim = TrackAnimation::new(self.scene(p)?, states.len());
        for i in 0..OBJECTS {
            let pts: Vec<[f64; 2]> = states.iter().map(|s| s.get(i).copied().unwrap_or(l.objects[i].position)).collect();
            anim = anim.track(ElementTrack::moving(format!("obj-{i}"), offsets(&pts, l.objects[i].position)));
        }
        Ok(Box::new(anim))
    }

    fn prompt_fields(&self, p: &ParamAssignment) -> Result<BTreeMap<String, String>, GenError> {
        let k = p.texts("kinds")?;
        Ok([("kind_a".to_string(), k[0].clone()), ("kind_b".to_string(), k[1].clone())].into())
    }

    fn salient(&self, _p: &ParamAssignment) -> Vec<String> {
        (0..OBJECTS).map(|i| format!("obj-{i}")).collect()
    }

    /// Same line-up but with both groups sorted largest first.
    fn violating_trajectory(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Trajectory, GenError> {
        let l = Layout::from_params(p)?;
        let mut targets = l.targets()?;
        for g in 0..2 {
            let mut idx: Vec<usize> = (3 * g..3 * g + 3).collect();
            idx.sort_by(|&a, &b| targets[a][0].total_cmp(&targets[b][0]));
            let (a, b) = (idx[0], idx[2]);
            targets.swap(a, b);
        }
        Ok(Trajectory::new(l.moves_to(&targets), t.frames_per_step))
    }
}
