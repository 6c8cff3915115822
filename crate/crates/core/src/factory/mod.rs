//! Local generation fabric: a leased job queue with retry and dead-letter,
//! a worker pool and idempotent sample storage.

mod fault;
mod message;
mod queue;
mod store;
mod worker;

use thiserror::Error;

pub use fault::{Fault, FaultPolicy};
pub use message::{enqueue_plan, JobMessage, OutputFormat, MAX_BATCH, MIN_BATCH};
pub use queue::{Lease, MemoryQueue, QueueStats, MAX_ATTEMPTS};
pub use store::{sample_key, ArchiveWriter, FsStore, MemoryStore, SampleStore, ARCHIVE_DIR, STAGING_DIR};
pub use worker::{run_pool, run_worker, EventSink, FactoryEvent, GenerateExecutor, JobExecutor, JobResult, JobStatus, ParamsExecutor, PoolSummary, WorkerConfig};

use crate::generators::GenError;
use crate::sample::SampleError;

#[derive(Debug, Error)]
pub enum FactoryError {
    #[error("config: {0}")]
    Config(String),
    #[error("plan: {0}")]
    Plan(String),
    #[error("invalid job message: {0}")]
    Message(String),
    #[error("storage conflict at {key}: stored {existing}, new {new}")]
    Conflict { key: String, existing: String, new: String },
    #[error("injected {0} fault")]
    Injected(&'static str),
    #[error("job exceeded its {0:?} budget")]
    Budget(std::time::Duration),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
