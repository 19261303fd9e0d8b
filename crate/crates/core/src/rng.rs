//! Seeded, platform-independent random numbers.
//!
//! The generator is ChaCha8 keyed by `seed_from_u64(seed)`; independent
//! streams are split off with the ChaCha stream counter. Uniforms use the top
//! 53 bits of a `u64` draw, `u = (w >> 11) · 2⁻⁵³ ∈ [0, 1)`. Standard normals
//! use the cosine branch of Box–Muller on two consecutive uniforms,
//! `z = √(−2 ln(1 − u₁)) · cos(2π u₂)`. Only correctly rounded operations and
//! the platform `ln`/`cos`/`sqrt` are involved.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Clone, Debug)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream derived from the same seed.
    pub fn stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform index in `0..n` by rejection, free of modulo bias.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let w = self.next_u64();
            if w < zone {
                return (w % n) as usize;
            }
        }
    }
}
