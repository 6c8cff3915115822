//! Corrupted variants of ground-truth videos, for checking that scorers
//! rank the real solution above them.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EvalError;
use crate::generators::{family, TaskFamily};
use crate::render::{render_trajectory, Frame};
use crate::sample::Manifest;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Perturbation {
    /// Frames in a seeded random order.
    Shuffle,
    /// The first frame repeated for the whole duration.
    Freeze,
    /// The family's rule-breaking trajectory, rendered the same way.
    Splice,
}

impl Perturbation {
    pub const ALL: [Perturbation; 3] = [Perturbation::Shuffle, Perturbation::Freeze, Perturbation::Splice];

    pub fn name(self) -> &'static str {
        match self {
            Perturbation::Shuffle => "shuffle",
            Perturbation::Freeze => "freeze",
            Perturbation::Splice => "splice",
        }
    }
}

/// Never returns the original order for two or more distinct frames.
pub fn shuffle_frames(frames: &[Frame], seed: u64) -> Vec<Frame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..frames.len()).collect();
    for _ in 0..16 {
        order.shuffle(&mut rng);
        if order.iter().enumerate().any(|(i, &j)| frames[i] != frames[j]) {
            break;
        }
    }
    order.iter().map(|&i| frames[i].clone()).collect()
}

pub fn freeze_frames(frames: &[Frame]) -> Vec<Frame> {
    frames.first().map(|f| vec![f.clone(); frames.len()]).unwrap_or_default()
}

pub fn splice_frames(fam: &dyn TaskFamily, m: &Manifest) -> Result<Vec<Frame>, EvalError> {
    let bad = fam.violating_trajectory(&m.params, &m.solution)?;
    let anim = fam.animation(&m.params, &bad)?;
    Ok(render_trajectory(anim.as_ref(), bad.frames_per_step, fam.spec().hold)?.into_frames())
}

pub fn perturb(m: &Manifest, reference: &[Frame], kind: Perturbation) -> Result<Vec<Frame>, EvalError> {
    Ok(match kind {
        Perturbation::Shuffle => shuffle_frames(reference, m.seed),
        Perturbation::Freeze => freeze_frames(reference),
        Perturbation::Splice => splice_frames(family(&m.task)?, m)?,
    })
}
