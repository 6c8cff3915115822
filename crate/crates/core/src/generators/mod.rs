//! Task-family generators: parameter sampling, scene construction, ground
//! truth and prompt text, composed into validated samples.

pub mod common;
pub mod families;
mod plan;
mod spec;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use plan::{build_split_plan, GenerationPlan, PlanCounts, PlanEntry};
pub use spec::{DimensionSpec, FamilySpec, Stratum, StratumSpec};

use crate::render::{render_scene, render_trajectory, Animation, RenderError, SceneSpec};
use crate::sample::{derive_seed, retry_seed, validate_sample, DuplicateRegistry, ParamAssignment, Sample, SampleError, Split, Trajectory};
use crate::solvers::SolveError;

/// Draw attempts before a configuration is declared infeasible.
pub const MAX_DRAWS: u32 = 1000;
/// Validation retries after the first attempt.
pub const MAX_RETRIES: u32 = 3;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("{family}: no feasible configuration after {attempts} draws (stratum {stratum})")]
    Infeasible { family: String, stratum: u32, attempts: u32 },
    #[error("prompt template: {0}")]
    Template(String),
    #[error("family config: {0}")]
    Config(String),
    #[error("parameter bounds: {0}")]
    Bounds(String),
    #[error("{family} index {index}: validation failed after {attempts} attempts: {reason}")]
    Validation { family: String, index: u64, attempts: u32, reason: String },
    #[error("plan: {0}")]
    Plan(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// One task family. Parameters fully determine the scene, so every method
/// below is a pure function of its arguments.
pub trait TaskFamily: Send + Sync {
    fn spec(&self) -> &FamilySpec;

    /// One attempt at drawing parameter values; `None` when the draw fails
    /// the family's feasibility predicate.
    fn draw(&self, rng: &mut ChaCha8Rng, stratum: Stratum<'_>) -> Result<Option<ParamAssignment>, GenError>;

    /// First-frame scene.
    fn scene(&self, p: &ParamAssignment) -> Result<SceneSpec, GenError>;

    /// Ground-truth trajectory from the solver.
    fn solve(&self, p: &ParamAssignment) -> Result<Trajectory, GenError>;

    /// Accepts `t` iff it starts in the initial state, every step is a legal
    /// transition, it ends in a goal state and it is optimal.
    fn check_solution(&self, p: &ParamAssignment, t: &Trajectory) -> Result<(), String>;

    /// Scene animation along `t`.
    fn animation(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Box<dyn Animation + '_>, GenError>;

    /// Values for the prompt template placeholders.
    fn prompt_fields(&self, p: &ParamAssignment) -> Result<BTreeMap<String, String>, GenError>;

    /// Element ids that must be legible and mutually non-overlapping.
    fn salient(&self, p: &ParamAssignment) -> Vec<String>;

    /// A trajectory that breaks the family's central rule, for testing scorers.
    fn violating_trajectory(&self, p: &ParamAssignment, t: &Trajectory) -> Result<Trajectory, GenError>;
}

fn registry() -> &'static [Box<dyn TaskFamily>] {
    static REG: OnceLock<Vec<Box<dyn TaskFamily>>> = OnceLock::new();
    REG.get_or_init(|| families::all().expect("bundled family configs are valid"))
}

/// All bundled families, in code order.
pub fn families() -> impl Iterator<Item = &'static dyn TaskFamily> {
    registry().iter().map(|f| f.as_ref())
}

pub fn family(code: &str) -> Result<&'static dyn TaskFamily, SampleError> {
    families().find(|f| f.spec().code == code).ok_or_else(|| SampleError::UnknownFamily(code.to_string()))
}

pub fn family_codes() -> Vec<&'static str> {
    families().map(|f| f.spec().code.as_str()).collect()
}

/// Seeded rejection sampling: up to `MAX_DRAWS` draws from one ChaCha8 stream.
pub fn sample_parameters(family: &dyn TaskFamily, seed: u64, stratum: u32) -> Result<ParamAssignment, GenError> {
    let st = family.spec().stratum(stratum)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        if let Some(p) = family.draw(&mut rng, st)? {
            return Ok(p);
        }
    }
    Err(GenError::Infeasible { family: family.spec().code.clone(), stratum, attempts: MAX_DRAWS })
}

/// Fills `{name}` placeholders. `{{` and `}}` are literal braces.
pub fn fill_template(template: &str, fields: &BTreeMap<String, String>) -> Result<String, GenError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(i) = rest.find(['{', '}']) {
        out.push_str(&rest[..i]);
        let c = rest.as_bytes()[i];
        if rest[i + 1..].starts_with(c as char) {
            out.push(c as char);
            rest = &rest[i + 2..];
            continue;
        }
        if c == b'}' {
            return Err(GenError::Template(format!("unmatched `}}` in `{template}`")));
        }
        let close = rest[i..].find('}').ok_or_else(|| GenError::Template(format!("unclosed `{{` in `{template}`")))? + i;
        let name = &rest[i + 1..close];
        let value = fields.get(name).ok_or_else(|| GenError::Template(format!("no value for placeholder `{{{name}}}`")))?;
        out.push_str(value);
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

pub fn build_prompt(family: &dyn TaskFamily, p: &ParamAssignment) -> Result<String, GenError> {
    fill_template(&family.spec().prompt, &family.prompt_fields(p)?)
}

/// Builds (but does not validate) the sample for fixed parameters.
pub fn assemble(family: &dyn TaskFamily, split: Split, index: u64, seed: u64, params: ParamAssignment) -> Result<Sample, GenError> {
    let spec = family.spec();
    let scene = family.scene(&params)?;
    let solution = family.solve(&params)?;
    let prompt = build_prompt(family, &params)?;
    let gt_frames = render_trajectory(family.animation(&params, &solution)?.as_ref(), solution.frames_per_step, spec.hold)?;
    let first_frame = render_scene(&scene)?;
    let final_frame = gt_frames.last().expect("non-empty").clone();
    Ok(Sample { task: spec.task(), split, index, seed, params, prompt, scene, solution, first_frame, final_frame, gt_frames })
}

/// derive_seed, sample_parameters, solve, render, validate. A failed
/// validation retries with the next sub-seed, at most `MAX_RETRIES` times.
pub fn generate(family: &dyn TaskFamily, split: Split, index: u64, registry: &DuplicateRegistry) -> Result<Sample, GenError> {
    generate_counted(family, split, index, registry).map(|(s, _)| s)
}

/// `generate`, also returning how many attempts failed validation first.
pub fn generate_counted(family: &dyn TaskFamily, split: Split, index: u64, registry: &DuplicateRegistry) -> Result<(Sample, u32), GenError> {
    let spec = family.spec();
    let base = derive_seed(&spec.task(), split, index)?;
    let stratum = spec.stratum_for(index);
    let mut last_reason = String::new();
    for attempt in 0..=MAX_RETRIES {
        let seed = retry_seed(base, attempt);
        let params = sample_parameters(family, seed, stratum)?;
        let sample = assemble(family, split, index, seed, params)?;
        let report = validate_sample(&sample, registry);
        if report.passed() {
            return Ok((sample, attempt));
        }
        last_reason = report.summary();
    }
    Err(GenError::Validation { family: spec.code.clone(), index, attempts: MAX_RETRIES + 1, reason: last_reason })
}

/// `generate` by family code.
pub fn generate_by_code(code: &str, split: Split, index: u64, registry: &DuplicateRegistry) -> Result<Sample, GenError> {
    generate(family(code)?, split, index, registry)
}
