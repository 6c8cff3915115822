//! In-process queue with visibility timeouts and a dead-letter list.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{FactoryError, JobMessage};

/// Deliveries per message: the first attempt and one retry.
pub const MAX_ATTEMPTS: u32 = 2;

/// A leased message. `token` distinguishes deliveries of the same message,
/// so a worker whose lease expired cannot settle the redelivery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lease {
    pub message: JobMessage,
    pub token: u64,
    pub deadline: Instant,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QueueStats {
    pub enqueued: u64,
    pub pending: u64,
    pub in_flight: u64,
    pub dead_lettered: u64,
    pub succeeded: u64,
    pub failed: u64,
    pub retried: u64,
    /// Per family: (samples produced, validation failures).
    pub validation: BTreeMap<String, (u64, u64)>,
}

impl QueueStats {
    /// Validation-failure attempts over all generation attempts.
    pub fn validation_failure_rate(&self, family: &str) -> f64 {
        match self.validation.get(family) {
            Some(&(ok, bad)) if ok + bad > 0 => bad as f64 / (ok + bad) as f64,
            _ => 0.0,
        }
    }

    /// Every message is in exactly one place.
    pub fn conserved(&self) -> bool {
        self.pending + self.in_flight + self.dead_lettered + self.succeeded == self.enqueued
    }
}

#[derive(Debug, Default)]
struct State {
    pending: VecDeque<JobMessage>,
    in_flight: BTreeMap<u64, (JobMessage, u64, Instant)>,
    dead: Vec<JobMessage>,
    next_token: u64,
    stats: QueueStats,
}

impl State {
    /// Returns a failed or expired delivery to pending, or dead-letters it.
    fn fail(&mut self, mut m: JobMessage) {
        self.stats.failed += 1;
        if m.attempt + 1 < MAX_ATTEMPTS {
            m.attempt += 1;
            self.stats.retried += 1;
            self.pending.push_back(m);
        } else {
            self.dead.push(m);
        }
    }

    fn reclaim(&mut self, now: Instant) {
        let expired: Vec<u64> = self.in_flight.iter().filter(|(_, (_, _, d))| *d <= now).map(|(id, _)| *id).collect();
        for id in expired {
            let (m, _, _) = self.in_flight.remove(&id).expect("listed");
            self.fail(m);
        }
    }

    fn refresh(&mut self) {
        self.stats.pending = self.pending.len() as u64;
        self.stats.in_flight = self.in_flight.len() as u64;
        self.stats.dead_lettered = self.dead.len() as u64;
    }
}

#[derive(Debug)]
pub struct MemoryQueue {
    state: Mutex<State>,
    visibility: Duration,
}

impl MemoryQueue {
    pub const DEFAULT_VISIBILITY: Duration = Duration::from_secs(15 * 60);

    pub fn new(visibility: Duration) -> Self {
        MemoryQueue { state: Mutex::new(State::default()), visibility }
    }

    pub fn visibility(&self) -> Duration {
        self.visibility
    }

    pub fn enqueue(&self, m: JobMessage) -> Result<(), FactoryError> {
        m.validate()?;
        let mut s = self.state.lock().unwrap();
        s.stats.enqueued += 1;
        s.pending.push_back(m);
        s.refresh();
        Ok(())
    }

    pub fn enqueue_all(&self, ms: impl IntoIterator<Item = JobMessage>) -> Result<(), FactoryError> {
        ms.into_iter().try_for_each(|m| self.enqueue(m))
    }

    /// Next pending message, after expired leases have been reclaimed.
    pub fn lease(&self, now: Instant) -> Option<Lease> {
        let mut s = self.state.lock().unwrap();
        s.reclaim(now);
        let m = s.pending.pop_front();
        let lease = m.map(|m| {
            s.next_token += 1;
            let token = s.next_token;
            let deadline = now + self.visibility;
            s.in_flight.insert(m.id, (m.clone(), token, deadline));
            Lease { message: m, token, deadline }
        });
        s.refresh();
        lease
    }

    fn settle(&self, lease: &Lease, ok: bool) -> bool {
        let mut s = self.state.lock().unwrap();
        let current = matches!(s.in_flight.get(&lease.message.id), Some((_, t, _)) if *t == lease.token);
        if current {
            let (m, _, _) = s.in_flight.remove(&lease.message.id).expect("checked");
            if ok {
                s.stats.succeeded += 1;
            } else {
                s.fail(m);
            }
        }
        s.refresh();
        current
    }

    /// Acknowledges success. `false` if the lease had already expired.
    pub fn ack(&self, lease: &Lease) -> bool {
        self.settle(lease, true)
    }

    /// Reports failure: one retry, then dead-letter.
    pub fn nack(&self, lease: &Lease) -> bool {
        self.settle(lease, false)
    }

    pub fn record_validation(&self, family: &str, produced: u64, failures: u64) {
        let mut s = self.state.lock().unwrap();
        let e = s.stats.validation.entry(family.to_string()).or_default();
        e.0 += produced;
        e.1 += failures;
    }

    /// Nothing pending or in flight.
    pub fn drained(&self, now: Instant) -> bool {
        let mut s = self.state.lock().unwrap();
        s.reclaim(now);
        s.refresh();
        s.pending.is_empty() && s.in_flight.is_empty()
    }

    pub fn dead_letters(&self) -> Vec<JobMessage> {
        self.state.lock().unwrap().dead.clone()
    }

    pub fn monitor(&self) -> QueueStats {
        let mut s = self.state.lock().unwrap();
        s.refresh();
        s.stats.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factory::OutputFormat;
    use crate::sample::Split;

    fn msg(id: u64) -> JobMessage {
        JobMessage { id, family: "G-15".into(), count: 25, start_index: 25 * id, split: Split::Train, base_seed: 0, format: OutputFormat::Files, attempt: 0 }
    }

    #[test]
    fn fresh_queue_is_empty() {
        let q = MemoryQueue::new(MemoryQueue::DEFAULT_VISIBILITY);
        assert_eq!(q.monitor(), QueueStats::default());
    }

    #[test]
    fn one_retry_then_dead_letter() {
        let q = MemoryQueue::new(Duration::from_secs(60));
        q.enqueue(msg(0)).unwrap();
        let now = Instant::now();
        let a = q.lease(now).unwrap();
        assert!(q.nack(&a));
        let b = q.lease(now).unwrap();
        assert_eq!(b.message.attempt, 1);
        assert!(q.nack(&b));
        assert!(q.lease(now).is_none());
        let s = q.monitor();
        assert_eq!((s.dead_lettered, s.retried, s.failed), (1, 1, 2));
        assert!(s.conserved());
    }

    #[test]
    fn expired_lease_is_redelivered_and_stale_ack_ignored() {
        let q = MemoryQueue::new(Duration::from_secs(10));
        q.enqueue(msg(3)).unwrap();
        let t0 = Instant::now();
        let a = q.lease(t0).unwrap();
        let b = q.lease(t0 + Duration::from_secs(11)).unwrap();
        assert_eq!(b.message.attempt, 1);
        assert!(!q.ack(&a));
        assert!(q.ack(&b));
        let s = q.monitor();
        assert_eq!((s.succeeded, s.retried), (1, 1));
        assert!(s.conserved());
    }
}
