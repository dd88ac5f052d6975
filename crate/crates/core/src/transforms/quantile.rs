use serde::{Deserialize, Serialize};

use super::normal::{normal_cdf, normal_inverse_cdf};
use super::stft::StftArray;
use crate::dataset::TimeSeriesDataset;
use crate::error::{invalid_input, invalid_param, Result};

pub const DEFAULT_N_QUANTILES: usize = 1024;

/// Monotone map from the empirical distribution of each channel onto the
/// standard normal, `y = Phi^{-1}(F(x))`, with `F` piecewise linear between
/// the fitted quantiles. Inputs beyond the extreme quantiles are clipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileMap {
    /// Probability points `(j + 1/2) / n`.
    pub probabilities: Vec<f64>,
    /// Standard normal quantiles at `probabilities`.
    pub references: Vec<f64>,
    /// Fitted quantiles, one non-decreasing vector per channel.
    pub quantiles: Vec<Vec<f64>>,
}

/// Linear interpolation of the sorted order statistics at probability `p`.
fn order_statistic(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl QuantileMap {
    /// Fits one map per channel from pooled samples.
    pub fn fit_channels(channels: &[Vec<f64>], n_quantiles: usize) -> Result<Self> {
        if n_quantiles < 2 {
            return Err(invalid_param(format!("need at least 2 quantiles, got {n_quantiles}")));
        }
        if channels.is_empty() {
            return Err(invalid_input("no channels to fit"));
        }
        let probabilities: Vec<f64> = (0..n_quantiles).map(|j| (j as f64 + 0.5) / n_quantiles as f64).collect();
        let references = probabilities
            .iter()
            .map(|&p| normal_inverse_cdf(p))
            .collect::<Result<Vec<_>>>()?;
        let mut quantiles = Vec::with_capacity(channels.len());
        for (c, samples) in channels.iter().enumerate() {
            if samples.len() < n_quantiles {
                return Err(invalid_input(format!(
                    "channel {c} has {} samples, fewer than {n_quantiles} quantiles",
                    samples.len()
                )));
            }
            if samples.iter().any(|v| !v.is_finite()) {
                return Err(invalid_input(format!("channel {c} contains non-finite values")));
            }
            let mut sorted = samples.clone();
            sorted.sort_unstable_by(|a, b| a.total_cmp(b));
            quantiles.push(probabilities.iter().map(|&p| order_statistic(&sorted, p)).collect());
        }
        Ok(QuantileMap { probabilities, references, quantiles })
    }

    /// Fits each channel of a dataset pooled over series and time.
    pub fn fit_dataset(ds: &TimeSeriesDataset, n_quantiles: usize) -> Result<Self> {
        let channels: Vec<Vec<f64>> = (0..ds.channels())
            .map(|c| (0..ds.n_series()).flat_map(|i| ds.channel(i, c).iter().copied()).collect())
            .collect();
        Self::fit_channels(&channels, n_quantiles)
    }

    /// Fits the real and imaginary STFT channels separately.
    pub fn fit_stft(arrays: &[StftArray], n_quantiles: usize) -> Result<Self> {
        let channels: Vec<Vec<f64>> = (0..2)
            .map(|c| arrays.iter().flat_map(|a| a.channel(c).iter().copied()).collect())
            .collect();
        Self::fit_channels(&channels, n_quantiles)
    }

    pub fn n_quantiles(&self) -> usize {
        self.probabilities.len()
    }

    pub fn n_channels(&self) -> usize {
        self.quantiles.len()
    }

    /// Empirical CDF at `x`, averaging the interpolation taken from below and
    /// from above so runs of tied quantiles map to their mid probability.
    fn cdf(&self, channel: usize, x: f64) -> f64 {
        let q = &self.quantiles[channel];
        let p = &self.probabilities;
        let n = q.len();
        let x = x.clamp(q[0], q[n - 1]);
        // Last index with q <= x, interpolating upward.
        let j = q.partition_point(|&v| v <= x) - 1;
        let up = if j == n - 1 { p[n - 1] } else { p[j] + (x - q[j]) / (q[j + 1] - q[j]) * (p[j + 1] - p[j]) };
        // First index with q >= x, interpolating downward.
        let k = q.partition_point(|&v| v < x);
        let down = if k == 0 { p[0] } else { p[k] - (q[k] - x) / (q[k] - q[k - 1]) * (p[k] - p[k - 1]) };
        0.5 * (up + down)
    }

    pub fn apply_value(&self, channel: usize, x: f64) -> f64 {
        // The clipped CDF stays within [p_0, p_last], strictly inside (0, 1).
        ppf(self.cdf(channel, x))
    }

    pub fn invert_value(&self, channel: usize, y: f64) -> f64 {
        let q = &self.quantiles[channel];
        let p = &self.probabilities;
        let n = p.len();
        let u = normal_cdf(y).clamp(p[0], p[n - 1]);
        let j = (p.partition_point(|&v| v <= u)).clamp(1, n - 1) - 1;
        q[j] + (u - p[j]) / (p[j + 1] - p[j]) * (q[j + 1] - q[j])
    }

    pub fn apply(&self, channel: usize, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| self.apply_value(channel, v)).collect()
    }

    pub fn invert(&self, channel: usize, y: &[f64]) -> Vec<f64> {
        y.iter().map(|&v| self.invert_value(channel, v)).collect()
    }

    fn check_channels(&self, channels: usize) -> Result<()> {
        if channels != self.n_channels() {
            return Err(invalid_input(format!(
                "map was fitted on {} channels, data has {channels}",
                self.n_channels()
            )));
        }
        Ok(())
    }

    fn map_dataset(&self, ds: &TimeSeriesDataset, f: impl Fn(usize, f64) -> f64) -> Result<TimeSeriesDataset> {
        self.check_channels(ds.channels())?;
        let len = ds.series_len();
        let data = ds
            .as_slice()
            .iter()
            .enumerate()
            .map(|(idx, &v)| f((idx / len) % ds.channels(), v))
            .collect();
        TimeSeriesDataset::new(ds.n_series(), ds.channels(), len, data)
    }

    pub fn apply_dataset(&self, ds: &TimeSeriesDataset) -> Result<TimeSeriesDataset> {
        self.map_dataset(ds, |c, v| self.apply_value(c, v))
    }

    pub fn invert_dataset(&self, ds: &TimeSeriesDataset) -> Result<TimeSeriesDataset> {
        self.map_dataset(ds, |c, v| self.invert_value(c, v))
    }

    pub fn apply_stft(&self, s: &StftArray) -> Result<StftArray> {
        self.check_channels(2)?;
        Ok(s.map_channels(|c, v| self.apply_value(c, v)))
    }

    pub fn invert_stft(&self, s: &StftArray) -> Result<StftArray> {
        self.check_channels(2)?;
        Ok(s.map_channels(|c, v| self.invert_value(c, v)))
    }
}

fn ppf(u: f64) -> f64 {
    normal_inverse_cdf(u).expect("clipped probability lies in (0, 1)")
}
