//! Workers lease jobs, produce every index of the batch and settle the lease.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::store::sample_key;
use super::{FactoryError, FaultPolicy, FsStore, JobMessage, Lease, MemoryQueue, MemoryStore, QueueStats, SampleStore, MAX_ATTEMPTS};
use crate::generators::{family, generate_counted, sample_parameters};
use crate::sample::{derive_seed, hash_params, DuplicateRegistry};

/// Produces and stores single samples of a job.
pub trait JobExecutor: Sync {
    /// Returns the stored key and how many draws failed validation.
    fn produce(&self, m: &JobMessage, index: u64) -> Result<(String, u32), FactoryError>;

    /// Runs after every index of a delivery has been produced.
    fn finish(&self, _m: &JobMessage) -> Result<(), FactoryError> {
        Ok(())
    }

    /// Runs after a delivery failed, to drop anything it staged.
    fn abort(&self, _m: &JobMessage) {}

    fn store(&self) -> &dyn SampleStore;
}

/// Full generation: solve, render, validate, write.
pub struct GenerateExecutor {
    pub store: FsStore,
}

impl JobExecutor for GenerateExecutor {
    fn produce(&self, m: &JobMessage, index: u64) -> Result<(String, u32), FactoryError> {
        // Duplicate checks are scoped to the delivery so outcomes never
        // depend on which worker ran which batch first.
        let registry = DuplicateRegistry::new();
        let (sample, rejected) = generate_counted(family(&m.family)?, m.split, index, &registry)?;
        self.store.write(m, &sample)?;
        Ok((sample_key(&m.family, m.split, index), rejected))
    }

    fn finish(&self, m: &JobMessage) -> Result<(), FactoryError> {
        self.store.seal(m)
    }

    fn abort(&self, m: &JobMessage) {
        let _ = self.store.discard(m);
    }

    fn store(&self) -> &dyn SampleStore {
        &self.store
    }
}

/// Parameter draws only, keyed by their canonical hash. Exercises seeding,
/// queueing and idempotent storage without rendering.
pub struct ParamsExecutor {
    pub store: MemoryStore,
}

impl JobExecutor for ParamsExecutor {
    fn produce(&self, m: &JobMessage, index: u64) -> Result<(String, u32), FactoryError> {
        let fam = family(&m.family)?;
        let seed = derive_seed(&fam.spec().task(), m.split, index)?;
        let p = sample_parameters(fam, seed, fam.spec().stratum_for(index))?;
        let key = sample_key(&m.family, m.split, index);
        self.store.stage(m, &key, &hash_params(&p)?.to_string());
        Ok((key, 0))
    }

    fn finish(&self, m: &JobMessage) -> Result<(), FactoryError> {
        self.store.commit(m)
    }

    fn abort(&self, m: &JobMessage) {
        self.store.discard(m)
    }

    fn store(&self) -> &dyn SampleStore {
        &self.store
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Ok,
    /// Failed; the message went back to pending.
    Retrying,
    DeadLettered,
    /// The lease expired before the worker settled it.
    Abandoned,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobResult {
    pub message: u64,
    pub family: String,
    pub attempt: u32,
    pub keys: Vec<String>,
    pub duration_ms: u64,
    pub validation_failures: u64,
    pub status: JobStatus,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum FactoryEvent {
    Job(JobResult),
    Stats(QueueStats),
}

/// Newline-delimited JSON event stream.
pub struct EventSink {
    out: Mutex<Box<dyn Write + Send>>,
}

impl EventSink {
    pub fn new(w: impl Write + Send + 'static) -> Self {
        EventSink { out: Mutex::new(Box::new(w)) }
    }

    pub fn emit(&self, e: &FactoryEvent) -> Result<(), FactoryError> {
        let mut line = serde_json::to_vec(e)?;
        line.push(b'\n');
        let mut out = self.out.lock().unwrap();
        out.write_all(&line)?;
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkerConfig {
    pub workers: usize,
    /// Wall-clock budget per delivery.
    pub job_budget: Duration,
    /// Sleep between polls while other workers hold the remaining leases.
    pub poll: Duration,
}

impl Default for WorkerConfig {
    fn default() -> Self {
        WorkerConfig { workers: 1, job_budget: MemoryQueue::DEFAULT_VISIBILITY, poll: Duration::from_millis(2) }
    }
}

fn execute(lease: &Lease, exec: &dyn JobExecutor, faults: &FaultPolicy, budget: Duration, keys: &mut Vec<String>, rejected: &mut u64) -> Result<(), FactoryError> {
    let m = &lease.message;
    let started = Instant::now();
    let fault = faults.fails(m.id, m.attempt);
    for (k, index) in m.indices().enumerate() {
        // Faults strike mid-batch so the retry has to rewrite stored samples.
        if k as u64 == m.count / 2 {
            if let Some(f) = fault {
                return Err(FactoryError::Injected(match f {
                    super::Fault::Transient => "transient",
                    super::Fault::Persistent => "persistent",
                }));
            }
        }
        if started.elapsed() > budget {
            return Err(FactoryError::Budget(budget));
        }
        let (key, r) = exec.produce(m, index)?;
        keys.push(key);
        *rejected += r as u64;
    }
    exec.finish(m)
}

/// Leases until the queue drains.
pub fn run_worker(queue: &MemoryQueue, exec: &dyn JobExecutor, faults: &FaultPolicy, cfg: &WorkerConfig, sink: Option<&EventSink>) -> Result<Vec<JobResult>, FactoryError> {
    let mut results = Vec::new();
    loop {
        let now = Instant::now();
        let Some(lease) = queue.lease(now) else {
            if queue.drained(now) {
                return Ok(results);
            }
            std::thread::sleep(cfg.poll);
            continue;
        };
        let m = &lease.message;
        let started = Instant::now();
        let (mut keys, mut rejected) = (Vec::new(), 0u64);
        let outcome = execute(&lease, exec, faults, cfg.job_budget, &mut keys, &mut rejected);
        let (status, error) = match outcome {
            Ok(()) => {
                if queue.ack(&lease) {
                    queue.record_validation(&m.family, keys.len() as u64, rejected);
                    (JobStatus::Ok, None)
                } else {
                    (JobStatus::Abandoned, None)
                }
            }
            Err(e) => {
                exec.abort(m);
                let settled = queue.nack(&lease);
                let status = if !settled {
                    JobStatus::Abandoned
                } else if m.attempt + 1 >= MAX_ATTEMPTS {
                    JobStatus::DeadLettered
                } else {
                    JobStatus::Retrying
                };
                (status, Some(e.to_string()))
            }
        };
        let r = JobResult {
            message: m.id,
            family: m.family.clone(),
            attempt: m.attempt,
            keys,
            duration_ms: started.elapsed().as_millis() as u64,
            validation_failures: rejected,
            status,
            error,
        };
        if let Some(s) = sink {
            s.emit(&FactoryEvent::Job(r.clone()))?;
        }
        results.push(r);
    }
}

#[derive(Clone, Debug)]
pub struct PoolSummary {
    /// Sorted by (message, attempt).
    pub results: Vec<JobResult>,
    pub stats: QueueStats,
    pub keys: BTreeSet<String>,
}

impl PoolSummary {
    pub fn dead_lettered(&self) -> Vec<u64> {
        self.results.iter().filter(|r| r.status == JobStatus::DeadLettered).map(|r| r.message).collect()
    }
}

/// Runs `cfg.workers` threads against one queue until it drains.
pub fn run_pool(queue: &MemoryQueue, exec: &dyn JobExecutor, faults: &FaultPolicy, cfg: &WorkerConfig, sink: Option<&EventSink>) -> Result<PoolSummary, FactoryError> {
    if cfg.workers == 0 {
        return Err(FactoryError::Config("at least one worker is required".into()));
    }
    let outs: Vec<Result<Vec<JobResult>, FactoryError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..cfg.workers).map(|_| s.spawn(|| run_worker(queue, exec, faults, cfg, sink))).collect();
        handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
    });
    let mut results = Vec::new();
    for o in outs {
        results.extend(o?);
    }
    results.sort_by_key(|r| (r.message, r.attempt));
    let stats = queue.monitor();
    if let Some(s) = sink {
        s.emit(&FactoryEvent::Stats(stats.clone()))?;
    }
    Ok(PoolSummary { results, stats, keys: exec.store().keys()? })
}
