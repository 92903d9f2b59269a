use rayon::prelude::*;
use serde::Serialize;

use super::{RngStream, WalkRng};

/// Samples per stream. Chunk `i` always draws from `stream.substream(i)`,
/// so results do not depend on how many threads run the chunks.
pub const CHUNK_SIZE: usize = 1024;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Running count, sum and sum of squares.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Estimator {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Estimator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Estimator) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.sum / self.count as f64
        }
    }

    /// Sample standard deviation with the `N - 1` denominator.
    pub fn std_dev(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let var = (self.sum_sq - self.sum * self.sum / n) / (n - 1.0);
        var.max(0.0).sqrt()
    }

    pub fn report(&self) -> EstimatorReport {
        let estimate = self.mean();
        let std_error = self.std_dev() / (self.count as f64).sqrt();
        EstimatorReport {
            estimate,
            samples: self.count,
            std_error,
            ci99: [estimate - Z_99 * std_error, estimate + Z_99 * std_error],
        }
    }
}

/// Point estimate with its standard error and 99% normal interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorReport {
    pub estimate: f64,
    pub samples: u64,
    pub std_error: f64,
    pub ci99: [f64; 2],
}

impl EstimatorReport {
    /// `|estimate - target|` in units of the standard error, with the
    /// error floored at `floor` so that degenerate samples still compare.
    pub fn z_score(&self, target: f64, floor: f64) -> f64 {
        (self.estimate - target).abs() / self.std_error.max(floor)
    }
}

/// Runs `per_chunk(rng, len)` over consecutive chunks of `samples` draws in
/// parallel and returns the chunk results in chunk order.
pub fn map_chunks<T, F>(samples: usize, stream: RngStream, per_chunk: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut WalkRng, usize) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|i| {
            let len = CHUNK_SIZE.min(samples - i * CHUNK_SIZE);
            let mut rng = stream.substream(i as u64).rng();
            per_chunk(&mut rng, len)
        })
        .collect()
}

/// Monte Carlo mean of `draw` over `samples` draws.
pub fn estimate_mean<F>(samples: usize, stream: RngStream, draw: F) -> EstimatorReport
where
    F: Fn(&mut WalkRng) -> f64 + Sync,
{
    let parts = map_chunks(samples, stream, |rng, len| {
        let mut est = Estimator::default();
        for _ in 0..len {
            est.push(draw(rng));
        }
        est
    });
    parts
        .iter()
        .fold(Estimator::default(), |mut acc, part| {
            acc.merge(part);
            acc
        })
        .report()
}

/// Bernoulli report for `hits` successes out of `samples`.
pub fn proportion(hits: u64, samples: u64) -> EstimatorReport {
    let est = Estimator { count: samples, sum: hits as f64, sum_sq: hits as f64 };
    est.report()
}
