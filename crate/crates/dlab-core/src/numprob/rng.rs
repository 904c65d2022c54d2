//! Keyed random streams.
//!
//! A stream is a ChaCha8 keystream whose key is derived from
//! `(seed, experiment)` and whose stream id is the round. Two runs with the
//! same key draw identical values per round no matter how many values any
//! other round consumed, which keeps replays bit-identical under parallel
//! execution.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash a label into an experiment id.
pub fn experiment_id(label: &str) -> u64 {
    // FNV-1a, then mixed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    splitmix(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    key: [u8; 32],
}

impl StreamKey {
    pub fn new(seed: Seed, experiment: u64) -> Self {
        let mut key = [0u8; 32];
        let mut s = seed.0 ^ splitmix(experiment);
        for chunk in key.chunks_mut(8) {
            s = splitmix(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        StreamKey { key }
    }

    /// Stream for one round.
    pub fn round(&self, t: u64) -> Stream {
        let mut inner = ChaCha8Rng::from_seed(self.key);
        inner.set_stream(t);
        Stream { inner }
    }

    /// Derive an independent key, e.g. for a sub-component of a run.
    pub fn child(&self, tag: u64) -> StreamKey {
        let mut s = self.round(u64::MAX - tag);
        let mut key = [0u8; 32];
        s.inner.fill_bytes(&mut key);
        StreamKey { key }
    }
}

#[derive(Debug, Clone)]
pub struct Stream {
    inner: ChaCha8Rng,
}

impl Stream {
    /// Convenience for tests and one-off draws: round 0 of `(seed, 0)`.
    pub fn from_seed(seed: u64) -> Self {
        StreamKey::new(Seed(seed), 0).round(0)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform index in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Inverse-CDF draw from a probability vector. Zero-mass entries are
    /// never returned.
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            last = i;
            acc += p;
            if u < acc {
                return i;
            }
        }
        last
    }
}
