//! Color-mask detection and trajectory extraction from rendered frames.

use serde::{Deserialize, Serialize};

use super::Diagnostic;
use crate::generators::common::GridGeom;
use crate::generators::families::{g15, g16, g31, g35, g45};
use crate::render::{Frame, Rgb};
use crate::sample::{Manifest, ParamAssignment, State};
use crate::solvers::Cell;

/// Maximum per-channel deviation still counted as the target color.
pub const COLOR_TOLERANCE: u8 = 40;
/// A runner-up blob at least this fraction of the largest makes a detection ambiguous.
pub const AMBIGUITY_RATIO: f64 = 0.5;

/// One 4-connected component of matching pixels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Blob {
    pub pixels: usize,
    pub centroid: [f64; 2],
    /// `[x0, y0, x1, y1]`, inclusive pixel indices.
    pub bbox: [u32; 4],
}

impl Blob {
    pub fn bbox_center(&self) -> [f64; 2] {
        [(self.bbox[0] + self.bbox[2] + 1) as f64 / 2.0, (self.bbox[1] + self.bbox[3] + 1) as f64 / 2.0]
    }
}

pub fn color_mask(frame: &Frame, color: Rgb, tol: u8) -> Vec<bool> {
    let (w, h) = frame.dims();
    let mut mask = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            mask.push(frame.get(x, y).matches(color, tol));
        }
    }
    mask
}

/// Connected components of `mask`, largest first (ties by scan order).
pub fn blobs(mask: &[bool], width: u32, height: u32) -> Vec<Blob> {
    let (w, h) = (width as usize, height as usize);
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut n, mut sx, mut sy) = (0usize, 0f64, 0f64);
        let mut bb = [u32::MAX, u32::MAX, 0, 0];
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            n += 1;
            sx += x as f64 + 0.5;
            sy += y as f64 + 0.5;
            bb = [bb[0].min(x as u32), bb[1].min(y as u32), bb[2].max(x as u32), bb[3].max(y as u32)];
            let mut visit = |j: usize| {
                if mask[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        out.push(Blob { pixels: n, centroid: [sx / n as f64, sy / n as f64], bbox: bb });
    }
    // Stable sort keeps scan order among equal sizes.
    out.sort_by(|a, b| b.pixels.cmp(&a.pixels));
    out
}

pub fn find_blobs(frame: &Frame, color: Rgb) -> Vec<Blob> {
    blobs(&color_mask(frame, color, COLOR_TOLERANCE), frame.width(), frame.height())
}

/// All matching pixels of `color` treated as one region.
pub fn color_region(frame: &Frame, color: Rgb) -> Option<Blob> {
    let found = find_blobs(frame, color);
    if found.is_empty() {
        return None;
    }
    let n: usize = found.iter().map(|b| b.pixels).sum();
    let cx = found.iter().map(|b| b.centroid[0] * b.pixels as f64).sum::<f64>() / n as f64;
    let cy = found.iter().map(|b| b.centroid[1] * b.pixels as f64).sum::<f64>() / n as f64;
    let bbox = found.iter().fold([u32::MAX, u32::MAX, 0, 0], |a, b| [a[0].min(b.bbox[0]), a[1].min(b.bbox[1]), a[2].max(b.bbox[2]), a[3].max(b.bbox[3])]);
    Some(Blob { pixels: n, centroid: [cx, cy], bbox })
}

/// How detected centroids map onto symbolic states.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantizer {
    /// Nearest grid cell.
    Grid(GridGeom),
    /// Node whose disc contains the centroid.
    Nodes { positions: Vec<[f64; 2]>, radius: f64 },
    /// Raw pixel position.
    Free,
}

impl Quantizer {
    pub fn quantize(&self, p: [f64; 2]) -> Option<State> {
        match self {
            Quantizer::Grid(g) => g.cell_at(p).map(State::cell),
            Quantizer::Nodes { positions, radius } => positions
                .iter()
                .position(|q| (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2) <= radius * radius)
                .map(|id| State::Node { id }),
            Quantizer::Free => Some(State::Point { x: p[0], y: p[1] }),
        }
    }
}

/// The moving agent of a family: its color, expected size and state space.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentSpec {
    pub color: Rgb,
    pub expected_pixels: f64,
    pub quantizer: Quantizer,
}

fn disc_area(r: f64) -> f64 {
    std::f64::consts::PI * r * r
}

/// Agent description for families that have a single moving agent.
pub fn agent_spec(task: &str, p: &ParamAssignment) -> Option<AgentSpec> {
    match task {
        "G-15" => {
            let l = g15::Layout::from_params(p).ok()?;
            Some(AgentSpec { color: g15::AGENT_COLOR, expected_pixels: disc_area(l.agent_radius()), quantizer: Quantizer::Grid(l.geom) })
        }
        "G-16" => {
            let l = g16::Layout::from_params(p).ok()?;
            Some(AgentSpec { color: g16::AGENT_COLOR, expected_pixels: disc_area(l.agent_radius()), quantizer: Quantizer::Grid(l.geom) })
        }
        "G-45" => {
            let l = g45::Layout::from_params(p).ok()?;
            Some(AgentSpec { color: g45::AGENT_COLOR, expected_pixels: disc_area(l.agent_radius()), quantizer: Quantizer::Grid(l.geom) })
        }
        "G-31" => {
            let l = g31::Layout::from_params(p).ok()?;
            Some(AgentSpec {
                color: g31::AGENT_COLOR,
                expected_pixels: 231.0,
                quantizer: Quantizer::Nodes { positions: l.graph.positions, radius: g31::NODE_RADIUS },
            })
        }
        "G-35" => Some(AgentSpec { color: g35::BALL_COLOR, expected_pixels: disc_area(g35::BALL_RADIUS), quantizer: Quantizer::Free }),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameDetection {
    pub frame: usize,
    pub centroid: [f64; 2],
    pub pixels: usize,
    pub confidence: f64,
    pub ambiguous: bool,
    pub quantized: Option<State>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtractedTrajectory {
    pub frame_count: usize,
    /// Present detections, in frame order.
    pub detections: Vec<FrameDetection>,
    pub absent: Vec<usize>,
    /// Quantized states with holds and in-transit frames removed.
    pub states: Vec<State>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ExtractedTrajectory {
    /// More than half the frames had no agent pixels at all.
    pub fn failed(&self) -> bool {
        self.frame_count == 0 || self.absent.len() * 2 > self.frame_count
    }

    pub fn cells(&self) -> Vec<Cell> {
        self.states.iter().filter_map(State::as_cell).collect()
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.states.iter().filter_map(State::as_node).collect()
    }

    /// Largest inter-frame jump allowed by `limit`, as a fraction of adjacent present-frame pairs.
    pub fn smooth_fraction(&self, limit: f64) -> f64 {
        let pairs: Vec<f64> = self
            .detections
            .windows(2)
            .filter(|w| w[1].frame == w[0].frame + 1)
            .map(|w| ((w[1].centroid[0] - w[0].centroid[0]).powi(2) + (w[1].centroid[1] - w[0].centroid[1]).powi(2)).sqrt())
            .collect();
        if pairs.is_empty() {
            return 0.0;
        }
        pairs.iter().filter(|d| **d <= limit).count() as f64 / pairs.len() as f64
    }

    pub fn last_centroid(&self) -> Option<[f64; 2]> {
        self.detections.last().map(|d| d.centroid)
    }
}

/// Tracks the largest agent-colored blob in every frame.
pub fn track_agent(frames: &[Frame], spec: &AgentSpec) -> ExtractedTrajectory {
    let mut out = ExtractedTrajectory { frame_count: frames.len(), ..Default::default() };
    for (i, f) in frames.iter().enumerate() {
        let found = find_blobs(f, spec.color);
        let Some(best) = found.first() else {
            out.absent.push(i);
            continue;
        };
        let ambiguous = found.get(1).is_some_and(|b| b.pixels as f64 >= AMBIGUITY_RATIO * best.pixels as f64);
        let mut confidence = (best.pixels as f64 / spec.expected_pixels).min(1.0);
        if ambiguous {
            confidence /= 2.0;
            out.diagnostics.push(Diagnostic::at(i, format!("{} agent-colored blobs of similar size", found.len())));
        }
        let quantized = spec.quantizer.quantize(best.centroid);
        if let Some(q) = &quantized {
            if out.states.last() != Some(q) {
                out.states.push(q.clone());
            }
        }
        out.detections.push(FrameDetection { frame: i, centroid: best.centroid, pixels: best.pixels, confidence, ambiguous, quantized });
    }
    if out.failed() {
        out.diagnostics.push(Diagnostic::new(format!("agent absent in {} of {} frames", out.absent.len(), out.frame_count)));
    }
    out
}

/// `track_agent` driven by a sample manifest. Families without a single
/// agent yield an empty, failed extraction.
pub fn extract_agent_track(frames: &[Frame], manifest: &Manifest) -> ExtractedTrajectory {
    match agent_spec(&manifest.task, &manifest.params) {
        Some(spec) => track_agent(frames, &spec),
        None => ExtractedTrajectory {
            frame_count: frames.len(),
            absent: (0..frames.len()).collect(),
            diagnostics: vec![Diagnostic::new(format!("{} has no single agent to track", manifest.task))],
            ..Default::default()
        },
    }
}

/// Pixels that are identical in every reference frame and differ from the background.
pub fn static_mask(reference: &[Frame], background: Rgb) -> Vec<bool> {
    let Some(first) = reference.first() else { return Vec::new() };
    let (w, h) = first.dims();
    let mut mask = vec![true; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let c = first.get(x, y);
            let i = (y * w + x) as usize;
            mask[i] = c != background && reference.iter().all(|f| f.get(x, y) == c);
        }
    }
    mask
}

/// Fraction of static-mask pixels the candidate reproduces, averaged over
/// its first, middle and last frames.
pub fn static_fidelity(reference: &Frame, mask: &[bool], candidate: &[Frame]) -> f64 {
    let total = mask.iter().filter(|m| **m).count();
    if total == 0 || candidate.is_empty() {
        return if total == 0 { 1.0 } else { 0.0 };
    }
    let w = reference.width();
    let picks = [0, candidate.len() / 2, candidate.len() - 1];
    let mut sum = 0.0;
    for &k in &picks {
        let f = &candidate[k];
        if f.dims() != reference.dims() {
            continue;
        }
        let ok = mask
            .iter()
            .enumerate()
            .filter(|(i, m)| **m && f.get(*i as u32 % w, *i as u32 / w).matches(reference.get(*i as u32 % w, *i as u32 / w), COLOR_TOLERANCE))
            .count();
        sum += ok as f64 / total as f64;
    }
    sum / picks.len() as f64
}
