//! Idempotent sample storage.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::{FactoryError, JobMessage, OutputFormat};
use crate::render::CodecConfig;
use crate::sample::{list_sample_dirs, read_manifest, write_sample, ManifestDigest, Sample, Split, MANIFEST};

pub const ARCHIVE_DIR: &str = "archives";
pub const STAGING_DIR: &str = ".staging";

pub fn sample_key(family: &str, split: Split, index: u64) -> String {
    format!("{family}/{split}/{index:06}")
}

/// Storage audited by key. Writing the same key twice must be a no-op when
/// the bytes agree and a conflict when they differ.
pub trait SampleStore: Send + Sync {
    fn keys(&self) -> Result<BTreeSet<String>, FactoryError>;
}

/// Key to digest map, for runs that only exercise the queue.
#[derive(Debug, Default)]
pub struct MemoryStore {
    entries: Mutex<BTreeMap<String, String>>,
    staged: Mutex<BTreeMap<(u64, u32), Vec<(String, String)>>>,
    writes: Mutex<u64>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&self, key: &str, digest: &str) -> Result<(), FactoryError> {
        *self.writes.lock().unwrap() += 1;
        let mut e = self.entries.lock().unwrap();
        match e.get(key) {
            Some(d) if d != digest => Err(FactoryError::Conflict { key: key.into(), existing: d.clone(), new: digest.into() }),
            Some(_) => Ok(()),
            None => {
                e.insert(key.to_string(), digest.to_string());
                Ok(())
            }
        }
    }

    /// Buffers a write for delivery `(m.id, m.attempt)`.
    pub fn stage(&self, m: &JobMessage, key: &str, digest: &str) {
        self.staged.lock().unwrap().entry((m.id, m.attempt)).or_default().push((key.to_string(), digest.to_string()));
    }

    /// Publishes everything the delivery staged.
    pub fn commit(&self, m: &JobMessage) -> Result<(), FactoryError> {
        let staged = self.staged.lock().unwrap().remove(&(m.id, m.attempt)).unwrap_or_default();
        staged.iter().try_for_each(|(k, d)| self.put(k, d))
    }

    pub fn discard(&self, m: &JobMessage) {
        self.staged.lock().unwrap().remove(&(m.id, m.attempt));
    }

    /// Every put call, including idempotent repeats.
    pub fn write_count(&self) -> u64 {
        *self.writes.lock().unwrap()
    }

    pub fn snapshot(&self) -> BTreeMap<String, String> {
        self.entries.lock().unwrap().clone()
    }
}

impl SampleStore for MemoryStore {
    fn keys(&self) -> Result<BTreeSet<String>, FactoryError> {
        Ok(self.entries.lock().unwrap().keys().cloned().collect())
    }
}

/// Sample tree on disk, plus per-batch tar archives for the archive format.
#[derive(Clone, Debug)]
pub struct FsStore {
    pub root: PathBuf,
    pub codec: CodecConfig,
}

impl FsStore {
    pub fn new(root: impl Into<PathBuf>, codec: CodecConfig) -> Self {
        FsStore { root: root.into(), codec }
    }

    fn staging(&self, m: &JobMessage) -> PathBuf {
        self.root.join(STAGING_DIR).join(format!("{}-{}-{:06}-a{}", m.family, m.split, m.start_index, m.attempt))
    }

    pub fn archive_path(&self, m: &JobMessage) -> PathBuf {
        self.root.join(ARCHIVE_DIR).join(&m.family).join(m.split.as_str()).join(format!("{:06}-{:06}.tar", m.start_index, m.start_index + m.count - 1))
    }

    /// Writes one sample of job `m` into the delivery's staging area.
    /// Nothing is visible under the root until [`FsStore::seal`].
    pub fn write(&self, m: &JobMessage, sample: &Sample) -> Result<ManifestDigest, FactoryError> {
        Ok(write_sample(sample, &self.staging(m), &self.codec)?)
    }

    /// Publishes a finished delivery: sample directories are renamed into the
    /// tree, or packed into one archive. Anything already in place must hold
    /// the same bytes.
    pub fn seal(&self, m: &JobMessage) -> Result<(), FactoryError> {
        let stage = self.staging(m);
        match m.format {
            OutputFormat::Files => {
                for dir in list_sample_dirs(&stage)? {
                    let rel = dir.strip_prefix(&stage).expect("listed under stage");
                    let target = self.root.join(rel);
                    if target.exists() {
                        let (old, new) = (fs::read(target.join(MANIFEST))?, fs::read(dir.join(MANIFEST))?);
                        if old != new {
                            return Err(FactoryError::Conflict { key: rel.display().to_string(), existing: digest(&old), new: digest(&new) });
                        }
                    } else {
                        fs::create_dir_all(target.parent().expect("sample dir has a parent"))?;
                        fs::rename(&dir, &target)?;
                    }
                }
            }
            OutputFormat::Archive => {
                let bytes = ArchiveWriter::pack(&stage)?;
                let target = self.archive_path(m);
                fs::create_dir_all(target.parent().expect("archive has a parent"))?;
                if target.exists() {
                    let existing = fs::read(&target)?;
                    if existing != bytes {
                        return Err(FactoryError::Conflict { key: target.display().to_string(), existing: digest(&existing), new: digest(&bytes) });
                    }
                } else {
                    let tmp = target.with_extension(format!("tar.tmp-{}-{}", m.id, m.attempt));
                    fs::write(&tmp, &bytes)?;
                    fs::rename(&tmp, &target)?;
                }
            }
        }
        self.discard(m)
    }

    /// Drops whatever a failed delivery staged.
    pub fn discard(&self, m: &JobMessage) -> Result<(), FactoryError> {
        let stage = self.staging(m);
        if stage.exists() {
            fs::remove_dir_all(stage)?;
        }
        Ok(())
    }
}

fn digest(b: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(b))
}

impl SampleStore for FsStore {
    fn keys(&self) -> Result<BTreeSet<String>, FactoryError> {
        let mut keys = BTreeSet::new();
        if !self.root.exists() {
            return Ok(keys);
        }
        for dir in list_sample_dirs(&self.root)? {
            if dir.starts_with(self.root.join(ARCHIVE_DIR)) {
                continue;
            }
            let m = read_manifest(&dir)?;
            keys.insert(sample_key(&m.task, m.split, m.index));
        }
        let archives = self.root.join(ARCHIVE_DIR);
        if archives.exists() {
            for tar_path in ArchiveWriter::list(&archives)? {
                keys.extend(ArchiveWriter::keys(&tar_path)?);
            }
        }
        Ok(keys)
    }
}

/// Deterministic tar packing: sorted entries, fixed metadata.
pub struct ArchiveWriter;

impl ArchiveWriter {
    pub fn pack(dir: &Path) -> Result<Vec<u8>, FactoryError> {
        let mut files = Vec::new();
        collect(dir, dir, &mut files)?;
        files.sort();
        let mut b = tar::Builder::new(Vec::new());
        for (rel, path) in files {
            let data = fs::read(&path)?;
            let mut h = tar::Header::new_ustar();
            h.set_size(data.len() as u64);
            h.set_mode(0o644);
            h.set_mtime(0);
            h.set_uid(0);
            h.set_gid(0);
            h.set_entry_type(tar::EntryType::Regular);
            b.append_data(&mut h, &rel, data.as_slice())?;
        }
        Ok(b.into_inner()?)
    }

    pub fn list(root: &Path) -> Result<Vec<PathBuf>, FactoryError> {
        let mut out = Vec::new();
        let mut stack = vec![root.to_path_buf()];
        while let Some(d) = stack.pop() {
            for e in fs::read_dir(&d)? {
                let p = e?.path();
                if p.is_dir() {
                    stack.push(p);
                } else if p.extension().is_some_and(|x| x == "tar") {
                    out.push(p);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Sample keys of every manifest inside an archive.
    pub fn keys(path: &Path) -> Result<Vec<String>, FactoryError> {
        let mut a = tar::Archive::new(fs::File::open(path)?);
        let mut out = Vec::new();
        for e in a.entries()? {
            let mut e = e?;
            if e.path()?.file_name().is_some_and(|n| n == "manifest.json") {
                let mut text = String::new();
                e.read_to_string(&mut text)?;
                let m: crate::sample::Manifest = serde_json::from_str(&text)?;
                out.push(sample_key(&m.task, m.split, m.index));
            }
        }
        Ok(out)
    }
}

fn collect(base: &Path, dir: &Path, out: &mut Vec<(PathBuf, PathBuf)>) -> std::io::Result<()> {
    for e in fs::read_dir(dir)? {
        let p = e?.path();
        if p.is_dir() {
            collect(base, &p, out)?;
        } else {
            out.push((p.strip_prefix(base).expect("under base").to_path_buf(), p));
        }
    }
    Ok(())
}

