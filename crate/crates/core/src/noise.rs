// SPDX-License-Identifier: Apache-2.0

//! Per-trajectory noise streams.
//!
//! Every trajectory owns a ChaCha8 stream selected by its index, keyed by the
//! master seed. Nothing is shared between trajectories, so the draws a
//! trajectory sees do not depend on which worker runs it. A stream is fully
//! described by (master seed, index, word position), which is what
//! checkpoints store.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoisePolicy {
    pub master_seed: u64,
}

impl NoisePolicy {
    pub fn new(master_seed: u64) -> Self {
        NoisePolicy { master_seed }
    }

    pub fn stream(&self, trajectory: usize) -> NoiseStream {
        NoiseStream::new(self.master_seed, trajectory as u64)
    }
}

#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(master_seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(index);
        NoiseStream { rng }
    }

    /// Restores a stream at a saved position.
    pub fn at(master_seed: u64, index: u64, word_pos: u128) -> Self {
        let mut s = Self::new(master_seed, index);
        s.rng.set_word_pos(word_pos);
        s
    }

    pub fn word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn index(&self) -> u64 {
        self.rng.get_stream()
    }

    /// Complex normal with ⟨ξ⟩ = ⟨ξξ⟩ = 0 and ⟨|ξ|²⟩ = 1.
    #[inline]
    pub fn complex_normal(&mut self) -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Adds `scale·ξ` to every entry.
    #[inline]
    pub fn add_scaled(&mut self, amps: &mut [Complex64], scale: f64) {
        for a in amps {
            *a += self.complex_normal() * scale;
        }
    }
}
