//! Counter-based deterministic random streams.
//!
//! Sampling must be reproducible independent of evaluation order and worker
//! count, so instead of a stateful generator every draw is a pure function
//! `(key, counter) -> u64` built from the SplitMix64 finalizer. Keys are
//! derived by hashing `(master_seed, tag, index)` chains, which gives each
//! trial and each coefficient its own stream.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_A: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_B: u64 = 0x94D0_49BB_1331_11EB;

/// SplitMix64 finalizer: a bijective avalanche mix on `u64`.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_A);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_B);
    z ^ (z >> 31)
}

/// A keyed counter stream. `derive` forks a statistically independent child;
/// `word` reads the n-th 64-bit word of the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stream {
    key: u64,
}

impl Stream {
    pub fn new(master_seed: u64) -> Self {
        Stream {
            key: mix(master_seed ^ GOLDEN),
        }
    }

    #[must_use]
    pub fn derive(&self, tag: u64) -> Stream {
        Stream {
            key: mix(self.key.wrapping_add(mix(tag.wrapping_mul(GOLDEN) ^ 0xD1B5_4A32_D192_ED03))),
        }
    }

    #[inline]
    pub fn word(&self, counter: u64) -> u64 {
        mix(self.key.wrapping_add(counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw on the open interval (0, 1): a 53-bit midpoint lattice,
    /// never exactly 0 or 1, so logs of it are always finite.
    #[inline]
    pub fn uniform_open(&self, counter: u64) -> f64 {
        (((self.word(counter) >> 11) as f64) + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }
}

/// Derives a stable child seed from a master seed and context indices
/// (e.g. `[n, trial]`), so every trial owns an independent stream no matter
/// which worker executes it.
pub fn child_seed(master: u64, parts: &[u64]) -> u64 {
    let mut s = Stream::new(master);
    for &p in parts {
        s = s.derive(p);
    }
    s.key
}

/// Stream tags used by the experiment layer. Fixed constants keep seed
/// derivations stable across releases.
pub mod tag {
    pub const COEFFICIENTS: u64 = 1;
    pub const FEKETE_RESTARTS: u64 = 2;
    pub const CARTAN_MC: u64 = 3;
    pub const CHECK_INSTANCES: u64 = 4;
}
