use serde::{Deserialize, Serialize};

use super::FactoryError;
use crate::generators::{family, GenerationPlan};
use crate::sample::{derive_seed, Split};

pub const MIN_BATCH: u64 = 25;
pub const MAX_BATCH: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Files,
    Archive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobMessage {
    pub id: u64,
    pub family: String,
    pub count: u64,
    pub start_index: u64,
    pub split: Split,
    /// Seed of the first index, recorded for audit; every index derives its own.
    pub base_seed: u64,
    pub format: OutputFormat,
    /// 0-based.
    pub attempt: u32,
}

impl JobMessage {
    /// Schema check run before enqueueing and after decoding.
    pub fn validate(&self) -> Result<(), FactoryError> {
        if self.count == 0 || self.count > MAX_BATCH {
            return Err(FactoryError::Message(format!("count {} outside 1..={MAX_BATCH}", self.count)));
        }
        family(&self.family).map_err(|e| FactoryError::Message(e.to_string()))?;
        if self.attempt > 1 {
            return Err(FactoryError::Message(format!("attempt {} exceeds the retry limit", self.attempt)));
        }
        Ok(())
    }

    pub fn indices(&self) -> std::ops::Range<u64> {
        self.start_index..self.start_index + self.count
    }

    pub fn to_json(&self) -> Result<String, FactoryError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, FactoryError> {
        let m: JobMessage = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }
}

/// Contiguous batches of `batch` indices per plan entry; only an entry's
/// last batch may be shorter.
pub fn enqueue_plan(plan: &GenerationPlan, batch: u64, format: OutputFormat) -> Result<Vec<JobMessage>, FactoryError> {
    if !(MIN_BATCH..=MAX_BATCH).contains(&batch) {
        return Err(FactoryError::Config(format!("batch {batch} outside {MIN_BATCH}..={MAX_BATCH}")));
    }
    let mut out = Vec::new();
    for e in &plan.entries {
        let fam = family(&e.family).map_err(|err| FactoryError::Plan(err.to_string()))?;
        let task = fam.spec().task();
        let mut start = e.start;
        while start < e.start + e.count {
            let count = batch.min(e.start + e.count - start);
            let m = JobMessage {
                id: out.len() as u64,
                family: e.family.clone(),
                count,
                start_index: start,
                split: e.split,
                base_seed: derive_seed(&task, e.split, start)?,
                format,
                attempt: 0,
            };
            m.validate()?;
            out.push(m);
            start += count;
        }
    }
    Ok(out)
}
