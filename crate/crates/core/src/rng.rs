//! Splittable deterministic random source.
//!
//! A stream is identified by a 64-bit seed and a path of 64-bit labels
//! (for example `[sample ordinal]`). The seed keys a ChaCha8 generator and
//! the hashed path selects one of its 2^64 independent streams, so the
//! value sequence depends only on `(seed, path)` and never on platform,
//! thread or call order elsewhere.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const PATH_SALT: u64 = 0x243f_6a88_85a3_08d3;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn path_id(labels: &[u64]) -> u64 {
    let mut h = splitmix64(PATH_SALT ^ labels.len() as u64);
    for &l in labels {
        h = splitmix64(h ^ splitmix64(l));
    }
    h
}

fn key_from_seed(seed: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    let mut s = seed;
    for chunk in key.chunks_exact_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    key
}

/// Derive the stream for `labels` under `seed`. An empty path is the root
/// stream.
pub fn derive_stream(seed: u64, labels: &[u64]) -> RandomSource {
    RandomSource::new(seed, path_id(labels))
}

/// A seeded stream with a running digest of everything drawn from it.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
    digest: u64,
    draws: u64,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::from_seed(key_from_seed(seed));
        rng.set_stream(stream);
        Self {
            seed,
            stream,
            rng,
            digest: splitmix64(seed ^ stream),
            draws: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Number of raw 64-bit words drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Order-sensitive digest of every raw word drawn so far.
    pub fn draw_digest(&self) -> u64 {
        self.digest
    }

    /// Child stream keyed by this stream's identity plus `label`; does not
    /// advance `self`.
    pub fn split(&self, label: u64) -> RandomSource {
        RandomSource::new(self.seed, splitmix64(self.stream ^ splitmix64(label)))
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = self.rng.next_u64();
        self.digest = splitmix64(self.digest ^ v);
        self.draws += 1;
        v
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % n;
            }
        }
    }

    /// Uniform integer in the closed range `[lo, hi]`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range");
        let span = hi.wrapping_sub(lo) as u64;
        if span == u64::MAX {
            return self.next_u64() as i64;
        }
        lo.wrapping_add(self.below(span + 1) as i64)
    }

    /// Uniform real in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit_f64()
    }

    /// Always consumes one draw, so the stream position does not depend on `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit_f64() < p
    }

    /// Box-Muller normal deviate; consumes two draws.
    pub fn gaussian(&mut self, mean: f64, std_dev: f64) -> f64 {
        let u1 = 1.0 - self.unit_f64();
        let u2 = self.unit_f64();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        mean + std_dev * r * libm::cos(core::f64::consts::TAU * u2)
    }
}
