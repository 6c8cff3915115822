//! On-disk sample layout: `<family>/<split>/<index>/` holding
//! `first_frame.png`, `prompt.txt`, `final_frame.png`, `ground_truth.mp4`
//! (or `frames/`) and `manifest.json`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Faculty, ParamAssignment, Sample, SampleError, Split, TaskId, Trajectory};
use crate::generators;
use crate::render::codec::{encode_png, encode_video, CodecConfig, FRAMES_DIR};
use crate::render::{decode_video, read_png, Frame, FrameSequence};

pub const FIRST_FRAME: &str = "first_frame.png";
pub const FINAL_FRAME: &str = "final_frame.png";
pub const PROMPT: &str = "prompt.txt";
pub const VIDEO: &str = "ground_truth.mp4";
pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digests {
    pub first: String,
    #[serde(rename = "final")]
    pub final_: String,
    pub video: String,
}

/// Symbolic truth for one sample; scorers read this instead of pixels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub task: String,
    pub faculty: Faculty,
    pub split: Split,
    pub seed: u64,
    pub index: u64,
    pub params: ParamAssignment,
    pub solution: Trajectory,
    pub digests: Digests,
}

impl Manifest {
    pub fn for_sample(sample: &Sample, digests: Digests) -> Self {
        Manifest {
            task: sample.task.family_code.clone(),
            faculty: sample.task.faculty,
            split: sample.split,
            seed: sample.seed,
            index: sample.index,
            params: sample.params.clone(),
            solution: sample.solution.clone(),
            digests,
        }
    }

    pub fn task_id(&self) -> Result<TaskId, SampleError> {
        TaskId::new(&self.task, self.faculty)
    }
}

/// SHA-256 over every file of a sample directory.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ManifestDigest(pub String);

impl fmt::Display for ManifestDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn sample_dir(root: &Path, family: &str, split: Split, index: u64) -> PathBuf {
    root.join(family).join(split.as_str()).join(format!("{index:06}"))
}

fn sha_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn collect_files(dir: &Path, rel: &Path, out: &mut Vec<(PathBuf, PathBuf)>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        let r = rel.join(entry.file_name());
        if entry.file_type()?.is_dir() {
            collect_files(&path, &r, out)?;
        } else {
            out.push((r, path));
        }
    }
    Ok(())
}

/// Digest of a file tree: sorted relative paths, each followed by its length and bytes.
pub fn tree_digest(dir: &Path) -> Result<String, SampleError> {
    let mut files = Vec::new();
    collect_files(dir, Path::new(""), &mut files)?;
    files.sort();
    let mut h = Sha256::new();
    for (rel, path) in files {
        let bytes = fs::read(&path)?;
        let name = rel.to_string_lossy().replace('\\', "/");
        h.update(name.as_bytes());
        h.update([0]);
        h.update((bytes.len() as u64).to_be_bytes());
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

pub fn directory_digest(dir: &Path) -> Result<ManifestDigest, SampleError> {
    tree_digest(dir).map(ManifestDigest)
}

fn staging_dir(target: &Path) -> PathBuf {
    static N: AtomicU64 = AtomicU64::new(0);
    let name = target.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    target.with_file_name(format!(".{name}.tmp-{}-{}", std::process::id(), N.fetch_add(1, Ordering::Relaxed)))
}

/// Writes the sample into a staging directory and renames it into place.
/// Rewriting identical bytes is a no-op; different bytes are a conflict.
pub fn write_sample(sample: &Sample, root: &Path, codec: &CodecConfig) -> Result<ManifestDigest, SampleError> {
    let target = sample_dir(root, &sample.task.family_code, sample.split, sample.index);
    let parent = target.parent().expect("sample dir has a parent");
    fs::create_dir_all(parent)?;
    let stage = staging_dir(&target);
    fs::create_dir_all(&stage)?;
    let result = (|| {
        let first = encode_png(&sample.first_frame)?;
        let last = encode_png(&sample.final_frame)?;
        fs::write(stage.join(FIRST_FRAME), &first)?;
        fs::write(stage.join(FINAL_FRAME), &last)?;
        fs::write(stage.join(PROMPT), sample.prompt.as_bytes())?;
        let video = encode_video(&sample.gt_frames, &stage.join(VIDEO), codec)?;
        let video_digest = match video {
            crate::render::VideoOutput::Mp4(p) => sha_hex(&fs::read(p)?),
            crate::render::VideoOutput::FramesDir(p) => tree_digest(&p)?,
        };
        let manifest = Manifest::for_sample(sample, Digests { first: sha_hex(&first), final_: sha_hex(&last), video: video_digest });
        fs::write(stage.join(MANIFEST), serde_json::to_vec_pretty(&manifest)?)?;
        directory_digest(&stage)
    })();
    let digest = match result {
        Ok(d) => d,
        Err(e) => {
            let _ = fs::remove_dir_all(&stage);
            return Err(e);
        }
    };
    if target.exists() {
        let existing = directory_digest(&target)?;
        fs::remove_dir_all(&stage)?;
        if existing != digest {
            return Err(SampleError::Conflict { path: target, existing: existing.0, new: digest.0 });
        }
        return Ok(digest);
    }
    if let Err(e) = fs::rename(&stage, &target) {
        let _ = fs::remove_dir_all(&stage);
        // Another writer may have won the race with the same bytes.
        if target.exists() && directory_digest(&target)? == digest {
            return Ok(digest);
        }
        return Err(e.into());
    }
    Ok(digest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, SampleError> {
    Ok(serde_json::from_slice(&fs::read(dir.join(MANIFEST))?)?)
}

/// The ground-truth video of a stored sample: the MP4 when present, else `frames/`.
pub fn video_path(dir: &Path) -> PathBuf {
    let mp4 = dir.join(VIDEO);
    if mp4.exists() {
        mp4
    } else {
        dir.join(FRAMES_DIR)
    }
}

/// Rebuilds a `Sample` from disk. The scene is regenerated from the manifest
/// parameters; frames and prompt come from the stored files.
pub fn load_sample(dir: &Path, codec: &CodecConfig) -> Result<Sample, SampleError> {
    let manifest = read_manifest(dir)?;
    let task = manifest.task_id()?;
    let family = generators::family(&task.family_code)?;
    let scene = family.scene(&manifest.params).map_err(|e| SampleError::Generation(e.to_string()))?;
    let first_frame: Frame = read_png(&dir.join(FIRST_FRAME))?;
    let final_frame: Frame = read_png(&dir.join(FINAL_FRAME))?;
    let gt_frames: FrameSequence = decode_video(&video_path(dir), codec)?;
    Ok(Sample {
        task,
        split: manifest.split,
        index: manifest.index,
        seed: manifest.seed,
        params: manifest.params,
        prompt: fs::read_to_string(dir.join(PROMPT))?,
        scene,
        solution: manifest.solution,
        first_frame,
        final_frame,
        gt_frames,
    })
}

/// Every sample directory (one holding a manifest) under `root`, sorted.
pub fn list_sample_dirs(root: &Path) -> Result<Vec<PathBuf>, SampleError> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
        if dir.join(MANIFEST).is_file() {
            out.push(dir.to_path_buf());
            return Ok(());
        }
        for entry in fs::read_dir(dir)? {
            let entry = entry?;
            if entry.file_type()?.is_dir() && !entry.file_name().to_string_lossy().starts_with('.') {
                walk(&entry.path(), out)?;
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(root, &mut out)?;
    out.sort();
    Ok(out)
}
