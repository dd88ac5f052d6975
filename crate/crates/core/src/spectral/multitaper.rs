use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::dpss::{dpss, DpssSet};
use crate::dataset::TimeSeriesDataset;
use crate::error::{invalid_input, invalid_param, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultitaperConfig {
    /// Time half-bandwidth product.
    pub nw: f64,
    /// Number of tapers.
    pub k: usize,
    pub nfft: usize,
    /// Subtract the series mean before tapering.
    #[serde(default)]
    pub demean: bool,
}

impl Default for MultitaperConfig {
    fn default() -> Self {
        MultitaperConfig {
            nw: 4.0,
            k: 7,
            nfft: 4096,
            demean: false,
        }
    }
}

/// One-sided PSD on the grid `f_k = k * df`, `k = 0..values.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdEstimate {
    pub df: f64,
    pub values: Vec<f64>,
}

impl PsdEstimate {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn freq(&self, k: usize) -> f64 {
        k as f64 * self.df
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| self.freq(k)).collect()
    }

    /// Integrated power, `sum(values) * df`.
    pub fn total_power(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.df
    }

    /// Fails unless every value is strictly positive and finite.
    pub fn check_positive(&self) -> Result<()> {
        match self.values.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            None => Ok(()),
            Some(k) => Err(invalid_input(format!(
                "PSD value at bin {k} is {}, must be positive",
                self.values[k]
            ))),
        }
    }
}

/// Eigenvalue-weighted multitaper estimator, prepared for one series length.
#[derive(Clone)]
pub struct Multitaper {
    cfg: MultitaperConfig,
    len: usize,
    tapers: DpssSet,
    weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Multitaper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Multitaper")
            .field("cfg", &self.cfg)
            .field("len", &self.len)
            .finish()
    }
}

impl Multitaper {
    pub fn new(cfg: MultitaperConfig, len: usize) -> Result<Self> {
        if len > cfg.nfft {
            return Err(invalid_param(format!(
                "series length {len} exceeds FFT length {}",
                cfg.nfft
            )));
        }
        if cfg.nfft < 2 {
            return Err(invalid_param("FFT length must be at least 2"));
        }
        let tapers = dpss(len, cfg.nw, cfg.k)?;
        let total: f64 = tapers.eigenvalues.iter().sum();
        let weights = tapers.eigenvalues.iter().map(|l| l / total).collect();
        let fft = FftPlanner::new().plan_fft_forward(cfg.nfft);
        Ok(Multitaper {
            cfg,
            len,
            tapers,
            weights,
            fft,
        })
    }

    pub fn config(&self) -> &MultitaperConfig {
        &self.cfg
    }

    pub fn tapers(&self) -> &DpssSet {
        &self.tapers
    }

    pub fn n_bins(&self) -> usize {
        self.cfg.nfft / 2 + 1
    }

    /// One-sided PSD of `x`. Interior bins are doubled so that
    /// `total_power()` matches the sample variance for white input.
    pub fn psd(&self, x: &[f64]) -> Result<PsdEstimate> {
        if x.len() != self.len {
            return Err(invalid_input(format!(
                "series length {} does not match prepared length {}",
                x.len(),
                self.len
            )));
        }
        let nfft = self.cfg.nfft;
        let offset = if self.cfg.demean {
            x.iter().sum::<f64>() / x.len() as f64
        } else {
            0.0
        };
        let n_bins = self.n_bins();
        let mut two_sided = vec![0.0; nfft];
        let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
        let tapers = &self.tapers.tapers;

        // Two real tapered series share one complex FFT.
        for pair in (0..tapers.len()).collect::<Vec<_>>().chunks(2) {
            buf.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            let a = &tapers[pair[0]];
            for t in 0..self.len {
                buf[t].re = a[t] * (x[t] - offset);
            }
            if let Some(&j) = pair.get(1) {
                let b = &tapers[j];
                for t in 0..self.len {
                    buf[t].im = b[t] * (x[t] - offset);
                }
            }
            self.fft.process(&mut buf);
            let wa = self.weights[pair[0]];
            let wb = pair.get(1).map(|&j| self.weights[j]);
            for k in 0..nfft {
                let z = buf[k];
                let zc = buf[(nfft - k) % nfft].conj();
                match wb {
                    Some(wb) => {
                        let fa = (z + zc) * 0.5;
                        let fb = (z - zc) * Complex64::new(0.0, -0.5);
                        two_sided[k] += wa * fa.norm_sqr() + wb * fb.norm_sqr();
                    }
                    None => two_sided[k] += wa * z.norm_sqr(),
                }
            }
        }

        let mut values = two_sided[..n_bins].to_vec();
        let nyquist = if nfft.is_multiple_of(2) { Some(nfft / 2) } else { None };
        for (k, v) in values.iter_mut().enumerate().skip(1) {
            if Some(k) != nyquist {
                *v *= 2.0;
            }
        }
        Ok(PsdEstimate {
            df: 1.0 / nfft as f64,
            values,
        })
    }

    /// PSDs of every series (first channel), in series order.
    pub fn psd_all(&self, ds: &TimeSeriesDataset) -> Result<Vec<PsdEstimate>> {
        (0..ds.n_series())
            .into_par_iter()
            .map(|i| self.psd(ds.series(i)))
            .collect()
    }

    /// Per-bin median of the per-series PSDs.
    pub fn median_psd(&self, ds: &TimeSeriesDataset) -> Result<PsdEstimate> {
        if ds.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let psds = self.psd_all(ds)?;
        Ok(median_of(&psds))
    }
}

/// Per-bin median of PSDs on a common grid.
pub fn median_of(psds: &[PsdEstimate]) -> PsdEstimate {
    let n_bins = psds[0].values.len();
    let mut column = vec![0.0; psds.len()];
    let values = (0..n_bins)
        .map(|k| {
            for (c, p) in column.iter_mut().zip(psds) {
                *c = p.values[k];
            }
            median_in_place(&mut column)
        })
        .collect();
    PsdEstimate {
        df: psds[0].df,
        values,
    }
}

/// Median with the two-middle-values average for even counts.
pub(crate) fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    let mid = n / 2;
    let (_, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::MIN, f64::max);
        0.5 * (lower + upper)
    }
}

/// Multitaper PSD of one series.
pub fn multitaper_psd(x: &[f64], cfg: &MultitaperConfig) -> Result<PsdEstimate> {
    Multitaper::new(*cfg, x.len())?.psd(x)
}

/// Per-bin median multitaper PSD over a dataset.
pub fn median_psd(ds: &TimeSeriesDataset, cfg: &MultitaperConfig) -> Result<PsdEstimate> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Multitaper::new(*cfg, ds.series_len())?.median_psd(ds)
}
