use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{hash_params, DuplicateKey, Sample, SampleError};
use crate::generators::{self, TaskFamily};
use crate::render::{render_scene, BBox, CANVAS};

/// Largest allowed overlap between two salient elements, as a fraction of the smaller one.
pub const MAX_OVERLAP_FRACTION: f64 = 0.10;
/// Smallest allowed width or height of a salient element, in pixels.
pub const MIN_ELEMENT_PX: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Solvability,
    VisualCompliance,
    BoundaryConstraints,
    ParameterBounds,
    Duplicate,
    VideoDependency,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::Solvability,
        Criterion::VisualCompliance,
        Criterion::BoundaryConstraints,
        Criterion::ParameterBounds,
        Criterion::Duplicate,
        Criterion::VideoDependency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Solvability => "solvability",
            Criterion::VisualCompliance => "visual_compliance",
            Criterion::BoundaryConstraints => "boundary_constraints",
            Criterion::ParameterBounds => "parameter_bounds",
            Criterion::Duplicate => "duplicate",
            Criterion::VideoDependency => "video_dependency",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub solvability: bool,
    pub visual_compliance: bool,
    pub boundary_constraints: bool,
    pub parameter_bounds: bool,
    pub duplicate: bool,
    pub video_dependency: bool,
    pub failures: Vec<(Criterion, String)>,
}

impl Default for ValidationReport {
    fn default() -> Self {
        Self {
            solvability: true,
            visual_compliance: true,
            boundary_constraints: true,
            parameter_bounds: true,
            duplicate: true,
            video_dependency: true,
            failures: Vec::new(),
        }
    }
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        Criterion::ALL.iter().all(|c| self.flag(*c))
    }

    pub fn flag(&self, c: Criterion) -> bool {
        match c {
            Criterion::Solvability => self.solvability,
            Criterion::VisualCompliance => self.visual_compliance,
            Criterion::BoundaryConstraints => self.boundary_constraints,
            Criterion::ParameterBounds => self.parameter_bounds,
            Criterion::Duplicate => self.duplicate,
            Criterion::VideoDependency => self.video_dependency,
        }
    }

    pub fn fail(&mut self, c: Criterion, msg: impl Into<String>) {
        *match c {
            Criterion::Solvability => &mut self.solvability,
            Criterion::VisualCompliance => &mut self.visual_compliance,
            Criterion::BoundaryConstraints => &mut self.boundary_constraints,
            Criterion::ParameterBounds => &mut self.parameter_bounds,
            Criterion::Duplicate => &mut self.duplicate,
            Criterion::VideoDependency => &mut self.video_dependency,
        } = false;
        self.failures.push((c, msg.into()));
    }

    pub fn summary(&self) -> String {
        self.failures.iter().map(|(c, m)| format!("{c}: {m}")).collect::<Vec<_>>().join("; ")
    }
}

/// Parameter keys seen in one run, per family. Inserts are serialized.
#[derive(Debug, Default)]
pub struct DuplicateRegistry {
    seen: Mutex<HashSet<(String, DuplicateKey)>>,
}

impl DuplicateRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, family: &str, key: &DuplicateKey) -> bool {
        self.seen.lock().unwrap().contains(&(family.to_string(), *key))
    }

    /// `false` when the key was already present.
    pub fn insert(&self, family: &str, key: DuplicateKey) -> bool {
        self.seen.lock().unwrap().insert((family.to_string(), key))
    }

    pub fn len(&self) -> usize {
        self.seen.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes `family<TAB>key` lines, sorted.
    pub fn save(&self, path: &Path) -> Result<(), SampleError> {
        let mut rows: Vec<String> = self.seen.lock().unwrap().iter().map(|(f, k)| format!("{f}\t{k}")).collect();
        rows.sort();
        let mut out = fs::File::create(path)?;
        for r in rows {
            writeln!(out, "{r}")?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SampleError> {
        let reg = Self::new();
        for line in BufReader::new(fs::File::open(path)?).lines() {
            let line = line?;
            let Some((f, k)) = line.split_once('\t') else { continue };
            let bytes = hex::decode(k).map_err(|e| SampleError::InvalidParameter(e.to_string()))?;
            let key = DuplicateKey(bytes.try_into().map_err(|_| SampleError::InvalidParameter("bad key length".into()))?);
            reg.insert(f, key);
        }
        Ok(reg)
    }
}

fn check_visuals(family: &dyn TaskFamily, sample: &Sample, report: &mut ValidationReport) {
    let ids = family.salient(&sample.params);
    let mut boxes: Vec<(&str, BBox)> = Vec::new();
    for id in &ids {
        match sample.scene.element(id) {
            Some(el) => boxes.push((id, el.shape.bbox())),
            None => report.fail(Criterion::VisualCompliance, format!("salient element `{id}` missing from the scene")),
        }
    }
    for (id, b) in &boxes {
        if b.width() < MIN_ELEMENT_PX || b.height() < MIN_ELEMENT_PX {
            report.fail(Criterion::VisualCompliance, format!("`{id}` is {:.1}x{:.1} px, below {MIN_ELEMENT_PX}", b.width(), b.height()));
        }
    }
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            let (a, b) = (&boxes[i].1, &boxes[j].1);
            let limit = MAX_OVERLAP_FRACTION * a.area().min(b.area());
            if a.intersection_area(b) > limit {
                report.fail(Criterion::VisualCompliance, format!("`{}` and `{}` overlap", boxes[i].0, boxes[j].0));
            }
        }
    }
    // Pixel spot check: stored frames must be exactly what the scenes render to.
    match render_scene(&sample.scene) {
        Ok(f) if f == sample.first_frame => {}
        Ok(_) => report.fail(Criterion::VisualCompliance, "first frame differs from its scene"),
        Err(e) => report.fail(Criterion::BoundaryConstraints, e.to_string()),
    }
    if sample.gt_frames.first() != Some(&sample.first_frame) {
        report.fail(Criterion::VisualCompliance, "video does not start on the first frame");
    }
    if sample.gt_frames.last() != Some(&sample.final_frame) {
        report.fail(Criterion::VisualCompliance, "video does not end on the final frame");
    }
}

/// Runs the six checks. Failures are report entries; nothing here errors.
/// The parameter key is registered only when every other check passes.
pub fn validate_sample(sample: &Sample, registry: &DuplicateRegistry) -> ValidationReport {
    let mut report = ValidationReport::default();
    let family = match generators::family(&sample.task.family_code) {
        Ok(f) => f,
        Err(e) => {
            report.fail(Criterion::Solvability, e.to_string());
            return report;
        }
    };

    if let Err(e) = family.spec().check_params(&sample.params) {
        report.fail(Criterion::ParameterBounds, e.to_string());
    }

    if let Err(e) = sample.scene.check() {
        report.fail(Criterion::BoundaryConstraints, e.to_string());
    }
    if sample.first_frame.dims() != (CANVAS, CANVAS) {
        report.fail(Criterion::BoundaryConstraints, format!("frame is {:?}, expected {CANVAS}x{CANVAS}", sample.first_frame.dims()));
    }
    match family.animation(&sample.params, &sample.solution) {
        Ok(anim) => {
            let last = anim.state_count().saturating_sub(1);
            if let Err(e) = anim.scene_at(last, 0, 1).and_then(|s| s.check()) {
                report.fail(Criterion::BoundaryConstraints, format!("final scene: {e}"));
            }
        }
        Err(e) => report.fail(Criterion::BoundaryConstraints, e.to_string()),
    }

    check_visuals(family, sample, &mut report);

    if sample.solution.states.len() < 2 {
        report.fail(Criterion::VideoDependency, "solution has no transitions");
    } else if sample.first_frame == sample.final_frame {
        report.fail(Criterion::VideoDependency, "final frame equals first frame");
    }

    if let Err(msg) = family.check_solution(&sample.params, &sample.solution) {
        report.fail(Criterion::Solvability, msg);
    }

    match hash_params(&sample.params) {
        Err(e) => report.fail(Criterion::ParameterBounds, e.to_string()),
        Ok(key) => {
            let code = &sample.task.family_code;
            let seen = if report.passed() { !registry.insert(code, key) } else { registry.contains(code, &key) };
            if seen {
                report.fail(Criterion::Duplicate, format!("parameter key {key} already generated"));
            }
        }
    }
    report
}
