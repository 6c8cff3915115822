use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Failure forced on a job attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Fails the first attempt only.
    Transient,
    /// Fails every attempt.
    Persistent,
}

/// Seeded fault injector. Decisions depend only on (seed, message id), never
/// on timing or worker, so runs are reproducible under any schedule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FaultPolicy {
    pub transient_rate: f64,
    pub persistent_rate: f64,
    pub seed: u64,
}

impl FaultPolicy {
    pub fn none() -> Self {
        Self::default()
    }

    fn unit(&self, id: u64, salt: &str) -> f64 {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(id.to_le_bytes());
        h.update(salt.as_bytes());
        let d = h.finalize();
        u64::from_le_bytes(d[..8].try_into().expect("8 bytes")) as f64 / (u64::MAX as f64 + 1.0)
    }

    /// The fault planned for message `id`, if any.
    pub fn planned(&self, id: u64) -> Option<Fault> {
        if self.unit(id, "persistent") < self.persistent_rate {
            Some(Fault::Persistent)
        } else if self.unit(id, "transient") < self.transient_rate {
            Some(Fault::Transient)
        } else {
            None
        }
    }

    /// Whether `attempt` of message `id` must fail.
    pub fn fails(&self, id: u64, attempt: u32) -> Option<Fault> {
        match self.planned(id) {
            Some(Fault::Persistent) => Some(Fault::Persistent),
            Some(Fault::Transient) if attempt == 0 => Some(Fault::Transient),
            _ => None,
        }
    }
}
