//! Rule-based scoring of candidate videos against sample manifests.

mod aggregate;
mod efficiency;
mod extract;
mod perturb;
mod prep;
mod rubrics;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aggregate::{aggregate, read_scores_csv, round3, write_scores_csv, BenchmarkTable, ModelRow, ScoreRecord, SplitAverages};
pub use efficiency::{path_efficiency_score, Efficiency, EfficiencyBand};
pub use extract::{
    agent_spec, blobs, color_mask, color_region, extract_agent_track, find_blobs, static_fidelity, static_mask, track_agent, AgentSpec, Blob, ExtractedTrajectory,
    FrameDetection, Quantizer, AMBIGUITY_RATIO, COLOR_TOLERANCE,
};
pub use perturb::{freeze_frames, perturb, shuffle_frames, splice_frames, Perturbation};
pub use prep::{normalize_frames, strip_padding};
pub use rubrics::{read_board, read_fill};

use crate::generators::{family, GenError, TaskFamily};
use crate::render::{decode_video, render_trajectory, CodecConfig, Frame, RenderError};
use crate::sample::{Manifest, SampleError, Split};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("rubric for {task} has no scorer output for `{dimension}`")]
    Rubric { task: String, dimension: String },
    #[error("no tasks in split {0}")]
    EmptySplit(String),
    #[error("unknown (task, split) pair: {0}")]
    UnknownRecord(String),
    #[error("scores csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub frame: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(message: impl Into<String>) -> Self {
        Diagnostic { frame: None, message: message.into() }
    }

    pub fn at(frame: usize, message: impl Into<String>) -> Self {
        Diagnostic { frame: Some(frame), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RubricDimension {
    pub id: String,
    pub name: String,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rubric {
    pub task: String,
    pub dimensions: Vec<RubricDimension>,
}

impl Rubric {
    pub fn weight_sum(&self) -> f64 {
        self.dimensions.iter().map(|d| d.weight).sum()
    }

    pub fn weight(&self, id: &str) -> Option<f64> {
        self.dimensions.iter().find(|d| d.id == id).map(|d| d.weight)
    }
}

pub fn rubric_of(fam: &dyn TaskFamily) -> Rubric {
    let s = fam.spec();
    Rubric { task: s.code.clone(), dimensions: s.rubric.iter().map(|d| RubricDimension { id: d.id.clone(), name: d.name.clone(), weight: d.weight }).collect() }
}

/// Rubrics of every bundled family.
pub fn registered_rubrics() -> Vec<Rubric> {
    crate::generators::families().map(rubric_of).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionScore {
    pub id: String,
    pub weight: f64,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub task: String,
    pub split: Split,
    pub index: u64,
    pub dimensions: Vec<DimensionScore>,
    pub total: f64,
    pub diagnostics: Vec<Diagnostic>,
}

impl ScoreReport {
    pub fn dimension(&self, id: &str) -> Option<f64> {
        self.dimensions.iter().find(|d| d.id == id).map(|d| d.score)
    }

    /// Every dimension 0, for candidates that cannot be read at all.
    pub fn zero(m: &Manifest, reason: impl Into<String>) -> Result<Self, EvalError> {
        let r = rubric_of(family(&m.task)?);
        Ok(ScoreReport {
            task: m.task.clone(),
            split: m.split,
            index: m.index,
            dimensions: r.dimensions.iter().map(|d| DimensionScore { id: d.id.clone(), weight: d.weight, score: 0.0 }).collect(),
            total: 0.0,
            diagnostics: vec![Diagnostic::new(reason)],
        })
    }
}

/// Ground-truth frames re-rendered from the manifest.
pub fn reference_frames(m: &Manifest) -> Result<Vec<Frame>, EvalError> {
    let fam = family(&m.task)?;
    let anim = fam.animation(&m.params, &m.solution)?;
    Ok(render_trajectory(anim.as_ref(), m.solution.frames_per_step, fam.spec().hold)?.into_frames())
}

/// Scores `candidate` against the sample described by `m`.
pub fn score_sample(m: &Manifest, candidate: &[Frame]) -> Result<ScoreReport, EvalError> {
    let reference = reference_frames(m)?;
    score_with_reference(m, &reference, candidate)
}

/// As [`score_sample`], reusing already rendered ground-truth frames.
pub fn score_with_reference(m: &Manifest, reference: &[Frame], candidate: &[Frame]) -> Result<ScoreReport, EvalError> {
    let fam = family(&m.task)?;
    let rubric = rubric_of(fam);
    if candidate.is_empty() {
        return ScoreReport::zero(m, "candidate has no frames");
    }
    let size = reference.first().map(|f| f.dims()).ok_or_else(|| EvalError::Manifest("ground truth renders no frames".into()))?;
    let frames = prep::normalize_frames(candidate, size);
    let mut cx = rubrics::Ctx { params: &m.params, solution: &m.solution, reference, candidate: &frames, diagnostics: Vec::new() };
    if frames.len() != candidate.len() || candidate[0].dims() != size {
        cx.diagnostics.push(Diagnostic::new(format!("candidate resized from {}x{}", candidate[0].width(), candidate[0].height())));
    }
    let scores = match m.task.as_str() {
        "G-15" => rubrics::g15(&mut cx)?,
        "G-16" => rubrics::g16(&mut cx)?,
        "G-31" => rubrics::g31(&mut cx)?,
        "G-45" => rubrics::g45(&mut cx)?,
        "G-3" => rubrics::g3(&mut cx)?,
        "O-47" => rubrics::o47(&mut cx)?,
        "O-49" => rubrics::o49(&mut cx)?,
        "G-35" => rubrics::g35(&mut cx)?,
        "O-85" => rubrics::o85(&mut cx)?,
        other => return Err(SampleError::UnknownFamily(other.to_string()).into()),
    };
    let mut dims = Vec::with_capacity(rubric.dimensions.len());
    for d in &rubric.dimensions {
        let score = scores
            .iter()
            .find(|(id, _)| *id == d.id)
            .map(|(_, s)| s.clamp(0.0, 1.0))
            .ok_or_else(|| EvalError::Rubric { task: m.task.clone(), dimension: d.id.clone() })?;
        dims.push(DimensionScore { id: d.id.clone(), weight: d.weight, score });
    }
    let total = dims.iter().map(|d| d.weight * d.score).sum::<f64>().clamp(0.0, 1.0);
    Ok(ScoreReport { task: m.task.clone(), split: m.split, index: m.index, dimensions: dims, total, diagnostics: cx.diagnostics })
}

/// Decodes and scores a candidate video. A video that cannot be decoded is
/// the model's failure, so it scores 0 instead of returning an error.
pub fn score_video_file(m: &Manifest, video: &Path, codec: &CodecConfig) -> Result<ScoreReport, EvalError> {
    match decode_video(video, codec) {
        Ok(seq) => score_sample(m, seq.frames()),
        Err(e) => ScoreReport::zero(m, format!("undecodable candidate: {e}")),
    }
}
