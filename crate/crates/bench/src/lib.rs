//! Shared fixtures for the criterion benchmarks.

use noisebench::{simulate_dataset, NoiseSpec, TimeSeriesDataset};

/// Series length used throughout the benchmarks.
pub const LEN: usize = 4096;

/// A small fixed-seed dataset of `n` series drawn from `spec`.
pub fn fixture(spec: &NoiseSpec, n: usize) -> TimeSeriesDataset {
    simulate_dataset(spec, n, LEN, 7).expect("fixture simulation")
}
