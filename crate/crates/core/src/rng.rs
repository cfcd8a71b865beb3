//! Random stream derivation.
//!
//! Every trial draws from a ChaCha stream keyed by a 64-bit trial seed.
//! The trial seed is `mix64(master_seed + GOLDEN * (index + 1))` (wrapping
//! arithmetic), where `mix64` is the SplitMix64 finalizer. The 256-bit ChaCha
//! key is four consecutive SplitMix64 outputs starting from the trial seed,
//! written little-endian. Each random quantity in a trial (vehicles, each
//! satellite shell, GPS, fading) reads from its own ChaCha stream id, so
//! adding satellites to one shell never perturbs another.
//!
//! Uniform doubles are `(next_u64 >> 11) * 2^-53`, exponential draws are
//! `-ln(1 - u)`. Both are spelled out here rather than taken from `rand`'s
//! distributions so that other implementations can replay a run.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::{ChaCha20Rng, ChaCha8Rng};
use serde::{Deserialize, Serialize};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master_seed`. Levels share it, which pairs
/// the geometry draws across integration levels.
pub fn derive_trial_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

fn expand_key(seed: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    let mut state = seed;
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(GOLDEN);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    key
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RngAlgorithm {
    ChaCha8,
    ChaCha20,
}

impl RngAlgorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            RngAlgorithm::ChaCha8 => "chacha8",
            RngAlgorithm::ChaCha20 => "chacha20",
        }
    }
}

impl fmt::Display for RngAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RngAlgorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chacha8" => Ok(RngAlgorithm::ChaCha8),
            "chacha20" => Ok(RngAlgorithm::ChaCha20),
            other => Err(format!("unknown generator `{other}`")),
        }
    }
}

/// Stream ids inside one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Vehicles = 0,
    CommShell = 1,
    NavShell = 2,
    SensingShell = 3,
    Gps = 4,
    Fading = 5,
}

#[derive(Debug, Clone)]
pub enum SimRng {
    ChaCha8(ChaCha8Rng),
    ChaCha20(ChaCha20Rng),
}

impl SimRng {
    pub fn new(algorithm: RngAlgorithm, seed: u64, stream: u64) -> Self {
        let key = expand_key(seed);
        match algorithm {
            RngAlgorithm::ChaCha8 => {
                let mut rng = ChaCha8Rng::from_seed(key);
                rng.set_stream(stream);
                SimRng::ChaCha8(rng)
            }
            RngAlgorithm::ChaCha20 => {
                let mut rng = ChaCha20Rng::from_seed(key);
                rng.set_stream(stream);
                SimRng::ChaCha20(rng)
            }
        }
    }

    pub fn for_trial(algorithm: RngAlgorithm, trial_seed: u64, stream: Stream) -> Self {
        Self::new(algorithm, trial_seed, stream as u64)
    }

    /// Convenience constructor for tests and one-off sampling.
    pub fn seeded(seed: u64) -> Self {
        Self::new(RngAlgorithm::ChaCha8, seed, 0)
    }
}

impl RngCore for SimRng {
    fn next_u32(&mut self) -> u32 {
        match self {
            SimRng::ChaCha8(r) => r.next_u32(),
            SimRng::ChaCha20(r) => r.next_u32(),
        }
    }

    fn next_u64(&mut self) -> u64 {
        match self {
            SimRng::ChaCha8(r) => r.next_u64(),
            SimRng::ChaCha20(r) => r.next_u64(),
        }
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        match self {
            SimRng::ChaCha8(r) => r.fill_bytes(dst),
            SimRng::ChaCha20(r) => r.fill_bytes(dst),
        }
    }
}

/// Uniform double in [0, 1) with 53 random bits.
pub fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard exponential draw by inversion.
pub fn exp1<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    -(-unit_f64(rng)).ln_1p()
}
