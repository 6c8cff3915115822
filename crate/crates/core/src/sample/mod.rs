//! Sample data model, seed policy, parameter hashing, validation and storage.

mod params;
mod seed;
pub mod storage;
mod types;
mod validate;

use std::path::PathBuf;

use thiserror::Error;

pub use params::{canonical_json, hash_params, DuplicateKey};
pub use seed::{derive_seed, retry_seed, stable_hash64, RETRY_STRIDE, SPLIT_CAPACITY};
pub use storage::{directory_digest, list_sample_dirs, load_sample, read_manifest, sample_dir, write_sample, Digests, Manifest, ManifestDigest, FINAL_FRAME, FIRST_FRAME, MANIFEST, PROMPT, VIDEO};
pub use types::{Faculty, ParamAssignment, ParamValue, Sample, Split, State, TaskId, Trajectory, KNOWN_FACULTIES};
pub use validate::{validate_sample, Criterion, DuplicateRegistry, ValidationReport, MAX_OVERLAP_FRACTION, MIN_ELEMENT_PX};

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("index {index} exceeds the per-split seed range")]
    RangeExhausted { index: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid task id: {0}")]
    InvalidTaskId(String),
    #[error("unknown task family `{0}`")]
    UnknownFamily(String),
    #[error("unknown split `{0}` (expected train, test-id or test-ood)")]
    UnknownSplit(String),
    #[error("{path} already holds different bytes (digest {existing}, new {new})")]
    Conflict { path: PathBuf, existing: String, new: String },
    #[error("generation failed: {0}")]
    Generation(String),
    #[error(transparent)]
    Render(#[from] crate::render::RenderError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
