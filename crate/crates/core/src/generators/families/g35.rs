//! Launch a ball so it reaches a target after a set number of wall bounces.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::super::common::*;
use super::super::{FamilySpec, GenError, Stratum, TaskFamily};
use crate::render::{Animation, Element, ElementTrack, Rgb, SceneSpec, Shape, TrackAnimation};
use crate::sample::{ParamAssignment, ParamValue, State, Trajectory};
use crate::solvers::{simulate_bounce, BounceOutcome, BounceWorld, Wall};

pub const BOX_MIN: f64 = 20.0;
pub const BOX_MAX: f64 = 492.0;
pub const BALL_RADIUS: f64 = 10.0;
pub const HORIZON: usize = 160;
pub const BALL_COLOR: Rgb = RED;
pub const TARGET_COLOR: Rgb = GREEN;
pub const WALL_COLOR: Rgb = MID_GRAY;
pub const ARROW_COLOR: Rgb = GRID_LINE;
const MIN_AXIS_SPEED: f64 = 2.0;

pub fn wall_name(w: Wall) -> &'static str {
    match w {
        Wall::Left => "left",
        Wall::Right => "right",
        Wall::Top => "top",
        Wall::Bottom => "bottom",
    }
}

#[derive(Clone, Debug)]
pub struct Layout {
    pub world: BounceWorld,
    pub bounces: usize,
    pub walls: Vec<String>,
}

impl Layout {
    pub fn from_params(p: &ParamAssignment) -> Result<Self, GenError> {
        let ball = int_pair(p.ints("ball")?, 0);
        let target = int_pair(p.ints("target")?, 0);
        let walls = p.texts("walls")?.to_vec();
        let speed = p.int("speed")? as f64;
        // Aim at the target's image mirrored across each wall to be hit.
        let (lo, hi) = (BOX_MIN + BALL_RADIUS, BOX_MAX - BALL_RADIUS);
        let mut aim = target;
        for w in &walls {
            match w.as_str() {
                "left" => aim[0] = 2.0 * lo - aim[0],
                "right" => aim[0] = 2.0 * hi - aim[0],
                "top" => aim[1] = 2.0 * lo - aim[1],
                "bottom" => aim[1] = 2.0 * hi - aim[1],
                other => return Err(GenError::Config(format!("unknown wall `{other}`"))),
            }
        }
        let (dx, dy) = (aim[0] - ball[0], aim[1] - ball[1]);
        let len = (dx * dx + dy * dy).sqrt();
        let world = BounceWorld {
            box_min: [BOX_MIN; 2],
            box_max: [BOX_MAX; 2],
            ball,
            ball_radius: BALL_RADIUS,
            velocity: [speed * dx / len, speed * dy / len],
            target,
            target_radius: p.int("target_radius")? as f64,
        };
        Ok(Layout { world, bounces: p.int("bounces")? as usize, walls })
    }

    pub fn simulate(&self) -> Result<BounceOutcome, GenError> {
        Ok(simulate_bounce(&self.world, HORIZON)?)
    }

    /// Ground-truth positions, launch through first contact with the target.
    pub fn path(&self) -> Result<Vec<[f64; 2]>, GenError> {
        let out = self.simulate()?;
        let hit = out.hit.ok_or_else(|| GenError::Config("ball never reaches the target".into()))?;
        Ok(out.positions[..=hit].to_vec())
    }
}

fn point(s: &State) -> Option<[f64; 2]> {
    match s {
        State::Point { x, y } => Some([*x, *y]),
        _ => None,
    }
}

pub struct G35 {
    spec: FamilySpec,
}

impl G35 {
    pub fn new(spec: FamilySpec) -> Self {
        Self { spec }
    }
}

impl TaskFamily for G35 {
    fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    fn draw(&self, rng: &mut ChaCha8Rng, st: Stratum<'_>) -> Result<Option<ParamAssignment>, GenError> {
        let bounces = st.pick(rng, "bounces")?;
        let radius = st.pick(rng, "target_radius")?;
        let speed = st.pick(rng, "speed")?;
        let walls: Vec<String> = match bounces {
            0 => vec![],
            1 => vec![["left", "right", "top", "bottom"].choose(rng).unwrap().to_string()],
            _ => vec![["left", "right"].choose(rng).unwrap().to_string(), ["top", "bottom"].choose(rng).unwrap().to_string()],
        };
        let ball = [rng.gen_range(60..=452i64), rng.gen_range(60..=452i64)];
        let (tlo, thi) = (BOX_MIN as i64 + radius, BOX_MAX as i64 - radius);
        let target = [rng.gen_range(tlo..=thi), rng.gen_range(tlo..=thi)];
        let gap = (((ball[0] - target[0]).pow(2) + (ball[1] - target[1]).pow(2)) as f64).sqrt();
        if gap < (radius as f64) + BALL_RADIUS + 40.0 {
            return Ok(None);
        }
        let mut p = ParamAssignment::new(st.index);
        p.set("bounces", ParamValue::Int(bounces))
            .set("target_radius", ParamValue::Int(radius))
            .set("speed", ParamValue::Int(speed))
            .set("ball", ParamValue::Ints(ball.to_vec()))
            .set("target", ParamValue::Ints(target.to_vec()))
            .set("walls", ParamValue::Texts(walls.clone()));
        let l = Layout::from_params(&p)?;
        let v = l.world.velocity;
        if v[0].abs() < MIN_AXIS_SPEED || v[1].abs() < MIN_AXIS_SPEED {
            return Ok(None);
        }
        let Ok(out) = l.simulate() else { return Ok(None) };
        let Some(hit) = out.hit else { return Ok(None) };
        // Only bounces before the hit count, and they must be the planned walls.
        let mut hit_walls: Vec<&str> = out.bounces.iter().filter(|b| b.step <= hit).map(|b| wall_name(b.wall)).collect();
        hit_walls.sort_unstable();
        let mut planned: Vec<&str> = walls.iter().map(String::as_str).collect();
        planned.sort_unstable();
        if hit_walls != planned {
            return Ok(None);
        }
        Ok(Some(p))
    }

    fn scene(&self, p: &ParamAssignment) -> Result<SceneSpec, GenError> {
        let l = Layout::from_params(p)?;
        let w = &l.world;
        let mut s = SceneSpec::new(Rgb::WHITE);
        let (t, e) = (BOX_MIN, 512.0 - BOX_MAX);
        s.push(Element::filled("wall-top", Shape::Rect { x: 0.0, y: 0.0, w: 512.0, h: t }, WALL_COLOR, 0));
        s.push(Element::filled("wall-bottom", Shape::Rect { x: 0.0, y: BOX_MAX, w: 512.0, h: e }, WALL_COLOR, 0));
        s.push(Element::filled("wall-left", Shape::Rect { x: 0.0, y: 0.0, w: t, h: 512.0 }, WALL_COLOR, 0));
        s.push(Element::filled("wall-right", Shape::Rect { x: BOX_MAX, y: 0.0, w: e, h: 512.0 }, WALL_COLOR, 0));
        s.push(Element::filled("target", Shape::Circle { cx: w.target[0], cy: w.target[1], r: w.target_radius }, TARGET_COLOR, 1));
        let speed = (w.velocity[0].powi(2) + w.velocity[1].powi(2)).sqrt();
        let u = [w.velocity[0] / speed, w.velocity[1] / speed];
        let from = [w.ball[0] + u[0] * (BALL_RADIUS + 4.0), w.ball[1] + u[1] * (BALL_RADIUS + 4.0)];
        let to = [w.ball[0] + u[0] * 56.0, w.ball[1] + u[1] * 56.0];
        s.push(Element::filled("arrow", Shape::Arrow { from, to, width: 3.0, head: 14.0 }, ARROW_COLOR, 2));
        s.push(Element::filled("ball", Shape::Circle { cx: w.ball[0], cy: w.ball[1], r: BALL_RADIUS }, BALL_COLOR, 3));
        Ok(s)
    }

    fn solve(&self, p: &ParamAssignment) -> Result<Trajectory, GenError> {
        let path = Layout::from_params(p)?.path()?;
        Ok(Trajectory::new(path.into_iter().map(|[x, y]| State::Point { x, y }).collect(), self.spec.frames_per_step))
    }

    fn check_solution(&self, p: &ParamAssignment, t: &Trajectory) -> Result<(), String> {
        let l = Layout::from_params(p).map_err(|e| e.to_string())?;
        let pts: Vec<[f64; 2]> = t.states.iter().map(point).collect::<Option<_>>().ok_or("states are not points")?;
        let gt = l.path().map_err(|e| e.to_string())?;
        if pts.len() != gt.len() {
            return Err(format!("{} steps, the ball reaches the target after {}", pts.len().saturating_sub(1), gt.len() - 1));
        }
        if let Some(k) = (0..gt.len()).find(|&k| (pts[k][0] - gt[k][0]).abs() > 1e-6 || (pts[k][1] - gt[k][1]).abs() > 1e-6) {
            return Err(format!("position {k} leaves the elastic path"));
        }
        let out = l.simulate().map_err(|e| e.to_string())?;
        let n = out.bounces.iter().filter(|b| b.step < gt.len()).count();
        if n != l.bounces {
            return Err(format!("{n} bounces, expected {}", l.bounces));
        }
        Ok(())
    }

    fn animation(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Box<dyn Animation + '_>, GenError> {
        let l = Layout::from_params(p)?;
        let pts: Vec<[f64; 2]> = t.states.iter().map(point).collect::<Option<_>>().ok_or_else(|| GenError::Config("G-35 states must be points".into()))?;
        let o = offsets(&pts, l.world.ball);
        Ok(Box::new(TrackAnimation::new(self.scene(p)?, pts.len()).track(ElementTrack::moving("ball", o))))
    }

    fn prompt_fields(&self, p: &ParamAssignment) -> Result<BTreeMap<String, String>, GenError> {
        let text = match p.int("bounces")? {
            0 => "directly, without touching any wall",
            1 => "after exactly one bounce off a wall",
            _ => "after exactly two bounces off the walls",
        };
        Ok([("bounce_text".to_string(), text.to_string())].into())
    }

    fn salient(&self, _p: &ParamAssignment) -> Vec<String> {
        vec!["ball".to_string(), "target".to_string()]
    }

    /// Turns the ball 90 degrees in mid-air, away from every wall.
    fn violating_trajectory(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Trajectory, GenError> {
        let l = Layout::from_params(p)?;
        let out = l.simulate()?;
        let mut pts: Vec<[f64; 2]> = t.states.iter().map(point).collect::<Option<_>>().ok_or_else(|| GenError::Config("G-35 states must be points".into()))?;
        if pts.len() < 3 {
            return Err(GenError::Config("path too short to turn".into()));
        }
        let (lo, hi) = l.world.limits();
        let speed = l.world.velocity[0].hypot(l.world.velocity[1]);
        let clear = |q: [f64; 2]| (0..2).all(|a| q[a] - lo[a] > 2.0 * speed + 2.0 && hi[a] - q[a] > 2.0 * speed + 2.0);
        let from = (pts.len() / 3).max(1);
        let k = (from..pts.len()).chain(1..from).find(|&k| clear(pts[k - 1])).ok_or_else(|| GenError::Config("no mid-air point to turn at".into()))?;
        let v = out.velocities[k - 1];
        let turned = [-v[1], v[0]];
        for i in k..pts.len() {
            let prev = pts[i - 1];
            pts[i] = [(prev[0] + turned[0]).clamp(lo[0], hi[0]), (prev[1] + turned[1]).clamp(lo[1], hi[1])];
        }
        Ok(Trajectory::new(pts.into_iter().map(|[x, y]| State::Point { x, y }).collect(), t.frames_per_step))
    }
}
