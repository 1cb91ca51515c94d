//! Counter-based splittable random streams.
//!
//! Every draw is a hash of `(key, counter)`, so a stream is a tiny value
//! type that can be forked into independent substreams by tag. Samplers key
//! substreams by `(replication, step, purpose)`; common-random-number
//! coupling falls out of two chains reading the same substream.

use rand_distr::{Distribution, StandardNormal};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: bijective, well-diffused 64-bit mixing.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic, splittable stream of pseudo-random draws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomStream {
    key: u64,
    counter: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream {
            key: mix64(seed ^ GAMMA),
            counter: 0,
        }
    }

    /// Fork an independent substream identified by `tag`. Forking does not
    /// consume state from `self`, so the same `(stream, tag)` pair always
    /// yields the same substream.
    pub fn substream(&self, tag: u64) -> Self {
        RandomStream {
            key: mix64(self.key ^ GAMMA.wrapping_mul(tag.wrapping_add(1))),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n).
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }

    /// Fair coin returning +1 or -1.
    pub fn sign(&mut self) -> i8 {
        if self.next_u64() & 1 == 0 {
            1
        } else {
            -1
        }
    }
}

impl rand_core::RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        RandomStream::next_u64(self)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
