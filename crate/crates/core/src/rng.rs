// SPDX-License-Identifier: Apache-2.0

//! Seeded, splittable pseudo-random source.
//!
//! Every consumer (the AQM, each web-traffic generator) draws from its own
//! ChaCha stream derived from the scenario seed, so adding a flow never
//! shifts another consumer's draws.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng::substream(seed, 0)
    }

    /// Independent stream `stream` of the generator keyed by `seed`.
    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Rng { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Exponential variate with the given rate (events per unit).
    pub fn exponential(&mut self, rate: f64) -> f64 {
        // 1 - u lies in (0, 1], so the log is finite.
        -(1.0 - self.uniform()).ln() / rate
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

/// Next uniform variate in [0, 1).
pub fn rand_uniform(rng: &mut Rng) -> f64 {
    rng.uniform()
}
