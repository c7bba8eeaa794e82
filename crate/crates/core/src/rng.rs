//! Deterministic random-number plumbing.
//!
//! Every stochastic trajectory is a pure function of a single `u64` seed.
//! Seeds for realization `i` of an ensemble come from [`derive_seed`], a
//! SplitMix64-style mixer that is bijective in the index for a fixed base
//! seed, so derived seeds never collide. Each seed keys a ChaCha8 stream
//! (counter-based, jump-free); uniforms are taken from the top 53 bits of
//! each 64-bit output and normals via the Box–Muller transform.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Derive the seed for stream `index` from `base`.
///
/// `base + index·φ` is bijective in `index` (φ odd), and the SplitMix64
/// finalizer is a bijection on `u64`, so for a fixed base the map
/// `index → seed` is injective over the full index range.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(GOLDEN)).wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// ChaCha8 stream keyed by expanding `seed` through four SplitMix64 rounds.
pub fn chacha(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        chunk.copy_from_slice(&derive_seed(seed, i as u64).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Uniform in `[0, 1)` from the top 53 bits of one generator output.
pub fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard-normal stream (Box–Muller, spare variate cached).
///
/// Consumption order is fixed: one pair of uniforms yields two normals, so
/// a trajectory that draws one variate per time step is reproducible from
/// its seed alone.
pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self { rng: chacha(seed), spare: None }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        // u1 in (0, 1] keeps the log finite.
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = uniform01(&mut self.rng);
        let r: f64 = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}
