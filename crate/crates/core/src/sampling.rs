//! Seeded random streams and the fixed batching used by every Monte Carlo loop.
//!
//! Work is always cut into batches of [`BATCH_SIZE`] samples. Batch `b` of a
//! run seeded with `seed` draws from ChaCha8 stream `b` of that seed, and the
//! per-batch results are returned in batch order. Because the partition never
//! depends on the thread count, a run is bit-for-bit reproducible whether it
//! executes sequentially or on any number of rayon workers.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub type SimRng = ChaCha8Rng;

pub const BATCH_SIZE: usize = 4096;

/// Stream `stream` of the ChaCha8 generator keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Split function for sub-experiments: `splitmix64(master ^ splitmix64(index))`.
///
/// Grid points, frozen dual-search batches and evaluation batches each get
/// their own derived master seed so that none of them share a stream.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Execution strategy for batch loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Rayon fan-out. Without the `parallel` feature this runs sequentially.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Runs `f` once per batch of `0..n` and returns the results in batch order.
pub fn map_batches<T, F>(n: usize, seed: u64, exec: Exec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>, &mut SimRng) -> T + Sync + Send,
{
    let batches = n.div_ceil(BATCH_SIZE);
    let run = |b: usize| {
        let start = b * BATCH_SIZE;
        let end = (start + BATCH_SIZE).min(n);
        let mut rng = stream_rng(seed, b as u64);
        f(start..end, &mut rng)
    };
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..batches).into_par_iter().map(run).collect(),
        _ => (0..batches).map(run).collect(),
    }
}

/// Maps fixed-size chunks of `items`, results in chunk order.
pub fn map_chunks<I, T, F>(items: &[I], exec: Exec, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&[I]) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => items.par_chunks(BATCH_SIZE).map(f).collect(),
        _ => items.chunks(BATCH_SIZE).map(f).collect(),
    }
}

/// Running mean and sum of squared deviations (Welford), mergeable in a
/// fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.n as f64 * w;
        self.n = n;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn batches_cover_range_in_order() {
        let ranges = map_batches(3 * BATCH_SIZE + 5, 1, Exec::Sequential, |r, _| r);
        assert_eq!(ranges.len(), 4);
        assert_eq!(ranges[0], 0..BATCH_SIZE);
        assert_eq!(ranges[3], 3 * BATCH_SIZE..3 * BATCH_SIZE + 5);
    }

    #[test]
    fn parallel_matches_sequential() {
        let draw =
            |r: Range<usize>, rng: &mut SimRng| -> Vec<u64> { r.map(|_| rng.random()).collect() };
        let a = map_batches(20_000, 9, Exec::Sequential, draw);
        let b = map_batches(20_000, 9, Exec::Parallel, draw);
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ() {
        let mut a = stream_rng(5, 0);
        let mut b = stream_rng(5, 1);
        assert_ne!(a.random::<u64>(), b.random::<u64>());
        assert_ne!(derive_seed(5, 0), derive_seed(5, 1));
    }

    #[test]
    fn merged_moments_match_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut parts = Moments::default();
        for chunk in xs.chunks(77) {
            let mut m = Moments::default();
            chunk.iter().for_each(|&x| m.push(x));
            parts.merge(&m);
        }
        assert_eq!(whole.n, parts.n);
        assert!((whole.mean - parts.mean).abs() < 1e-12);
        assert!((whole.variance() - parts.variance()).abs() < 1e-9);
    }
}
