//! Rotate a pinned polygon about its pivot by a given angle and direction.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::super::common::*;
use super::super::{FamilySpec, GenError, Stratum, TaskFamily};
use crate::render::detmath::sin_cos_deg;
use crate::render::{Animation, Element, RenderError, Rgb, SceneSpec, Shape};
use crate::sample::{ParamAssignment, ParamValue, State, Trajectory};

pub const PIVOT: [f64; 2] = [256.0, 256.0];
pub const STEP_DEG: f64 = 15.0;
pub const PIVOT_RADIUS: f64 = 6.0;
pub const MARKER_RADIUS: f64 = 9.0;
/// Marker sits this fraction of the way out along the first vertex.
pub const MARKER_FRACTION: f64 = 0.6;
pub const POLY_COLOR: Rgb = Rgb(20, 160, 160);
pub const MARKER_COLOR: Rgb = ORANGE;
pub const PIVOT_COLOR: Rgb = GRID_LINE;

/// Screen-space rotation about the pivot; positive angles turn clockwise on screen.
pub fn rotate(p: [f64; 2], deg: f64) -> [f64; 2] {
    let (s, c) = sin_cos_deg(deg);
    let (x, y) = (p[0] - PIVOT[0], p[1] - PIVOT[1]);
    [PIVOT[0] + x * c - y * s, PIVOT[1] + x * s + y * c]
}

#[derive(Clone, Debug)]
pub struct Layout {
    pub vertices: Vec<[f64; 2]>,
    pub marker: [f64; 2],
    /// Signed target angle, clockwise positive.
    pub target_deg: f64,
    pub steps: usize,
}

impl Layout {
    pub fn from_params(p: &ParamAssignment) -> Result<Self, GenError> {
        let angles = p.ints("angles")?;
        let radii = p.ints("radii")?;
        if angles.len() != radii.len() || angles.len() < 3 {
            return Err(GenError::Config("polygon needs matching angles and radii".into()));
        }
        let vertices: Vec<[f64; 2]> = angles
            .iter()
            .zip(radii)
            .map(|(&a, &r)| {
                let (s, c) = sin_cos_deg(a as f64);
                [PIVOT[0] + r as f64 * c, PIVOT[1] + r as f64 * s]
            })
            .collect();
        let (s, c) = sin_cos_deg(angles[0] as f64);
        let mr = radii[0] as f64 * MARKER_FRACTION;
        let steps = p.int("steps")? as usize;
        let sign = match p.text("direction")? {
            "cw" => 1.0,
            "ccw" => -1.0,
            d => return Err(GenError::Config(format!("unknown direction `{d}`"))),
        };
        Ok(Layout { vertices, marker: [PIVOT[0] + mr * c, PIVOT[1] + mr * s], target_deg: sign * STEP_DEG * steps as f64, steps })
    }

    pub fn scene_at_angle(&self, deg: f64) -> SceneSpec {
        let mut s = SceneSpec::new(Rgb::WHITE);
        s.push(Element::filled("polygon", Shape::Polygon { points: self.vertices.iter().map(|v| rotate(*v, deg)).collect() }, POLY_COLOR, 0));
        let [cx, cy] = rotate(self.marker, deg);
        s.push(Element::filled("marker", Shape::Circle { cx, cy, r: MARKER_RADIUS }, MARKER_COLOR, 1));
        s.push(Element::filled("pivot", Shape::Circle { cx: PIVOT[0], cy: PIVOT[1], r: PIVOT_RADIUS }, PIVOT_COLOR, 2));
        s
    }

    pub fn angles(&self, target_deg: f64) -> Vec<f64> {
        let n = (target_deg.abs() / STEP_DEG).round() as usize;
        let sign = target_deg.signum();
        (0..=n).map(|k| sign * STEP_DEG * k as f64).collect()
    }
}

fn angle(s: &State) -> Option<f64> {
    match s {
        State::Angle { deg } => Some(*deg),
        _ => None,
    }
}

struct RotateAnimation {
    layout: Layout,
    angles: Vec<f64>,
}

impl Animation for RotateAnimation {
    fn state_count(&self) -> usize {
        self.angles.len()
    }

    fn scene_at(&self, step: usize, num: u32, den: u32) -> Result<SceneSpec, RenderError> {
        let a = *self.angles.get(step).ok_or_else(|| RenderError::Animation(format!("no state {step}")))?;
        let deg = if num == 0 {
            a
        } else {
            let b = *self.angles.get(step + 1).ok_or_else(|| RenderError::Animation(format!("no state {}", step + 1)))?;
            a + (b - a) * num as f64 / den as f64
        };
        Ok(self.layout.scene_at_angle(deg))
    }
}

pub struct O85 {
    spec: FamilySpec,
}

impl O85 {
    pub fn new(spec: FamilySpec) -> Self {
        Self { spec }
    }
}

impl TaskFamily for O85 {
    fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    fn draw(&self, rng: &mut ChaCha8Rng, st: Stratum<'_>) -> Result<Option<ParamAssignment>, GenError> {
        let steps = st.pick(rng, "steps")?;
        let m = st.pick(rng, "num_vertices")?;
        let sector = 360 / m;
        let phase = rng.gen_range(0..360i64);
        let jitter = sector / 4;
        let angles: Vec<i64> = (0..m).map(|i| (phase + i * sector + rng.gen_range(-jitter..=jitter)).rem_euclid(360)).collect();
        // Alternate long and short spokes so the outline has no symmetry to hide the turn.
        let radii: Vec<i64> = (0..m).map(|i| if i % 2 == 0 { rng.gen_range(110..=150) } else { rng.gen_range(60..=100) }).collect();
        if radii[0] < 110 {
            return Ok(None);
        }
        let direction = if rng.gen_bool(0.5) { "cw" } else { "ccw" };
        let mut p = ParamAssignment::new(st.index);
        p.set("steps", ParamValue::Int(steps))
            .set("num_vertices", ParamValue::Int(m))
            .set("angles", ParamValue::Ints(angles))
            .set("radii", ParamValue::Ints(radii))
            .set("direction", ParamValue::Text(direction.to_string()));
        Ok(Some(p))
    }

    fn scene(&self, p: &ParamAssignment) -> Result<SceneSpec, GenError> {
        Ok(Layout::from_params(p)?.scene_at_angle(0.0))
    }

    fn solve(&self, p: &ParamAssignment) -> Result<Trajectory, GenError> {
        let l = Layout::from_params(p)?;
        Ok(Trajectory::new(l.angles(l.target_deg).into_iter().map(|deg| State::Angle { deg }).collect(), self.spec.frames_per_step))
    }

    fn check_solution(&self, p: &ParamAssignment, t: &Trajectory) -> Result<(), String> {
        let l = Layout::from_params(p).map_err(|e| e.to_string())?;
        let angles: Vec<f64> = t.states.iter().map(angle).collect::<Option<_>>().ok_or("states are not angles")?;
        if angles.first() != Some(&0.0) {
            return Err("rotation does not start at 0 degrees".into());
        }
        if angles.last() != Some(&l.target_deg) {
            return Err(format!("rotation ends at {:?}, expected {}", angles.last(), l.target_deg));
        }
        let step = l.target_deg.signum() * STEP_DEG;
        if let Some(k) = angles.windows(2).position(|w| w[1] - w[0] != step) {
            return Err(format!("step {k} does not turn {step} degrees"));
        }
        if angles.len() != l.steps + 1 {
            return Err(format!("{} steps, expected {}", angles.len() - 1, l.steps));
        }
        Ok(())
    }

    fn animation(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Box<dyn Animation + '_>, GenError> {
        let layout = Layout::from_params(p)?;
        let angles: Vec<f64> = t.states.iter().map(angle).collect::<Option<_>>().ok_or_else(|| GenError::Config("O-85 states must be angles".into()))?;
        Ok(Box::new(RotateAnimation { layout, angles }))
    }

    fn prompt_fields(&self, p: &ParamAssignment) -> Result<BTreeMap<String, String>, GenError> {
        let dir = if p.text("direction")? == "cw" { "clockwise" } else { "counterclockwise" };
        Ok([("angle".to_string(), (STEP_DEG as i64 * p.int("steps")?).to_string()), ("direction".to_string(), dir.to_string())].into())
    }

    fn salient(&self, _p: &ParamAssignment) -> Vec<String> {
        vec!["pivot".to_string(), "marker".to_string()]
    }

    /// Reaches the same pose by turning the other way round.
    fn violating_trajectory(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Trajectory, GenError> {
        let l = Layout::from_params(p)?;
        let other = -l.target_deg.signum() * (360.0 - l.target_deg.abs());
        Ok(Trajectory::new(l.angles(other).into_iter().map(|deg| State::Angle { deg }).collect(), t.frames_per_step))
    }
}
