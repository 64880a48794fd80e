//! Seed derivation.
//!
//! Every run has a single root seed. Each consumer of randomness gets its own
//! ChaCha8 stream: the key is expanded from the root seed and the 64-bit
//! stream id is the counter-based split
//!
//! ```text
//! stream = role << 48 | a << 24 | b
//! ```
//!
//! where `role` names the consumer and `(a, b)` are usually `(type, server)`.
//! Streams never overlap, so adding a policy or a pair never perturbs the
//! draws seen by another consumer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamRole {
    Arrival = 1,
    Service = 2,
    SlotZero = 3,
    TieBreak = 4,
    Policy = 5,
}

const INDEX_MASK: u64 = (1 << 24) - 1;

pub fn stream(seed: u64, role: StreamRole, a: usize, b: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = (role as u64) << 48 | (a as u64 & INDEX_MASK) << 24 | (b as u64 & INDEX_MASK);
    rng.set_stream(id);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = stream(7, StreamRole::Service, 1, 2).sample_iter(rand::distributions::Standard).take(8).collect();
        let b: Vec<u64> = stream(7, StreamRole::Service, 1, 2).sample_iter(rand::distributions::Standard).take(8).collect();
        let c: Vec<u64> = stream(7, StreamRole::Service, 2, 1).sample_iter(rand::distributions::Standard).take(8).collect();
        let d: Vec<u64> = stream(7, StreamRole::Arrival, 1, 2).sample_iter(rand::distributions::Standard).take(8).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
