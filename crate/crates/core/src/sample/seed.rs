use sha2::{Digest, Sha256};

use super::{SampleError, Split, TaskId};

/// Seeds per split; indices must stay below this.
pub const SPLIT_CAPACITY: u64 = 1 << 32;

/// Stride between retry sub-seeds.
pub const RETRY_STRIDE: u64 = 1 << 48;

/// First eight bytes of SHA-256, big-endian. Stable across platforms and
/// releases, unlike `std::hash`.
pub fn stable_hash64(s: &str) -> u64 {
    let d = Sha256::digest(s.as_bytes());
    u64::from_be_bytes(d[..8].try_into().expect("8 bytes"))
}

/// `hash64(code) ^ (split_base + index)`. XOR with a fixed value is a
/// bijection, so the three split ranges stay disjoint after mixing.
pub fn derive_seed(task: &TaskId, split: Split, index: u64) -> Result<u64, SampleError> {
    if index >= SPLIT_CAPACITY {
        return Err(SampleError::RangeExhausted { index });
    }
    Ok(stable_hash64(&task.family_code) ^ (split.base() + index))
}

/// Seed for retry `attempt` (0 is the base seed itself).
pub fn retry_seed(seed: u64, attempt: u32) -> u64 {
    seed.wrapping_add(RETRY_STRIDE.wrapping_mul(attempt as u64))
}
