//! Monte Carlo accumulation with reproducible parallel chunking.
//!
//! Draws are split into fixed-size chunks; chunk `c` uses `stream.child(c)`
//! and partial accumulators are merged in chunk order. Output therefore
//! depends on `(seed, path, n)` and not on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::RngStream;

/// Number of draws per parallel chunk.
pub const CHUNK: usize = 1024;

/// Streaming mean and variance (Welford), mergeable with Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanVar {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &MeanVar) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let nf = n as f64;
        self.mean += delta * other.n as f64 / nf;
        self.m2 += other.m2 + delta * delta * (self.n as f64) * (other.n as f64) / nf;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    pub fn estimate(&self, stream: &RngStream) -> McEstimate {
        McEstimate {
            mean: self.mean(),
            std_error: self.std_error(),
            n_samples: self.n,
            seed: stream.seed(),
            stream: stream.path().to_vec(),
        }
    }
}

impl FromIterator<f64> for MeanVar {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = MeanVar::default();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// A Monte Carlo mean with its standard error and the stream that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub stream: Vec<u64>,
}

impl McEstimate {
    /// A deterministic value dressed as an estimate (zero error, no samples).
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            std_error: 0.0,
            n_samples: 0,
            seed: 0,
            stream: Vec::new(),
        }
    }
}

fn chunk_len(n: usize, c: usize) -> usize {
    CHUNK.min(n - c * CHUNK)
}

/// Accumulates `k` statistics per draw over `n` draws.
///
/// `draw` fills its output slice with the statistics of one independent draw.
pub fn accumulate<F>(n: usize, k: usize, stream: &RngStream, draw: F) -> Vec<MeanVar>
where
    F: Fn(&mut RngStream, &mut [f64]) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<Vec<MeanVar>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.child(c as u64);
            let mut acc = vec![MeanVar::default(); k];
            let mut buf = vec![0.0; k];
            for _ in 0..chunk_len(n, c) {
                draw(&mut rng, &mut buf);
                for (a, x) in acc.iter_mut().zip(&buf) {
                    a.push(*x);
                }
            }
            acc
        })
        .collect();
    let mut total = vec![MeanVar::default(); k];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    total
}

/// Convenience wrapper for a single statistic.
pub fn estimate<F>(n: usize, stream: &RngStream, draw: F) -> McEstimate
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    accumulate(n, 1, stream, |rng, out| out[0] = draw(rng))[0].estimate(stream)
}

/// Collects `n` raw draws in chunk order.
pub fn draws<F>(n: usize, stream: &RngStream, draw: F) -> Vec<f64>
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.child(c as u64);
            (0..chunk_len(n, c)).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.concat()
}
