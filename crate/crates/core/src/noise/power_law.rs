//! Fractionally differenced white noise, fractional Gaussian noise and
//! fractional Brownian motion.
//!
//! FGN is sampled exactly by circulant embedding of its autocovariance; FBM is
//! the cumulative sum of an FGN path. FDWN is sampled exactly from its
//! autocovariance by the Durbin-Levinson recursion (circulant embedding is
//! available as an alternative).

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid_param, Error, Result};
use crate::variates::RngStream;

/// Relative tolerance below which negative embedding eigenvalues count as
/// rounding noise.
const EMBEDDING_TOL: f64 = 1e-8;

fn check_hurst(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(invalid_param(format!("Hurst index must lie in (0, 1), got {h}")))
    }
}

fn check_d(d: f64) -> Result<()> {
    if d > -0.5 && d < 0.5 {
        Ok(())
    } else {
        Err(invalid_param(format!("fractional difference must lie in (-0.5, 0.5), got {d}")))
    }
}

/// Autocovariance of fractional Gaussian noise at lag `k`.
pub fn fgn_autocovariance(hurst: f64, sigma_y2: f64, k: usize) -> Result<f64> {
    check_hurst(hurst)?;
    Ok(fgn_acvf_unchecked(hurst, sigma_y2, k))
}

fn fgn_acvf_unchecked(hurst: f64, sigma2: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * sigma2 * ((k - 1.0).abs().powf(h2) + (k + 1.0).powf(h2) - 2.0 * k.powf(h2))
}

/// Autocovariance sequence `gamma(0..len)` of fractionally differenced white
/// noise with innovation variance `sigma_eps2`.
pub fn fdwn_autocovariances(d: f64, sigma_eps2: f64, len: usize) -> Result<Vec<f64>> {
    check_d(d)?;
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return Ok(out);
    }
    let g0 = sigma_eps2 * (ln_gamma(1.0 - 2.0 * d) - 2.0 * ln_gamma(1.0 - d)).exp();
    out.push(g0);
    for k in 1..len {
        let kf = k as f64;
        let prev = out[k - 1];
        out.push(prev * (kf - 1.0 + d) / (kf - d));
    }
    Ok(out)
}

/// Autocovariance of fractionally differenced white noise at lag `k`.
pub fn fdwn_autocovariance(d: f64, sigma_eps2: f64, k: usize) -> Result<f64> {
    Ok(fdwn_autocovariances(d, sigma_eps2, k + 1)?[k])
}

/// Exact stationary Gaussian sampler by circulant embedding.
///
/// The autocovariance row is embedded in a circulant of size
/// `next_power_of_two(2 * len)`, whose eigenvalues come from one FFT.
#[derive(Clone)]
pub struct CirculantSampler {
    len: usize,
    scaled_sqrt_eig: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CirculantSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantSampler")
            .field("len", &self.len)
            .field("embedding", &self.scaled_sqrt_eig.len())
            .finish()
    }
}

impl CirculantSampler {
    /// `acvf` must provide lags `0..=m/2` where `m` is the embedding size.
    pub fn new(len: usize, acvf: impl Fn(usize) -> f64) -> Result<Self> {
        let m = (2 * len.max(1)).next_power_of_two();
        let half = m / 2;
        let mut row: Vec<Complex64> = (0..m)
            .map(|j| {
                let lag = if j <= half { j } else { m - j };
                Complex64::new(acvf(lag), 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut row);

        let max = row.iter().map(|c| c.re).fold(f64::MIN, f64::max);
        let mut scaled_sqrt_eig = Vec::with_capacity(m);
        for (index, c) in row.iter().enumerate() {
            let value = c.re;
            if value < -EMBEDDING_TOL * max {
                return Err(Error::EmbeddingFailure { index, value, max });
            }
            scaled_sqrt_eig.push((value.max(0.0) / m as f64).sqrt());
        }
        Ok(CirculantSampler {
            len,
            scaled_sqrt_eig,
            fft,
        })
    }

    /// Eigenvalues of the embedding circulant.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = self.scaled_sqrt_eig.len() as f64;
        self.scaled_sqrt_eig.iter().map(|s| s * s * m).collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn sample(&self, s: &mut RngStream) -> Vec<f64> {
        let mut buf: Vec<Complex64> = self
            .scaled_sqrt_eig
            .iter()
            .map(|&w| Complex64::new(w * s.std_normal(), w * s.std_normal()))
            .collect();
        self.fft.process(&mut buf);
        buf[..self.len].iter().map(|c| c.re).collect()
    }
}

/// Exact stationary Gaussian sampler by the Durbin-Levinson recursion.
///
/// Prediction coefficients for every step are computed once from the
/// autocovariance and stored as a packed lower triangle (`len^2 / 2` values).
#[derive(Debug, Clone)]
pub struct DurbinLevinson {
    coeffs: Vec<f64>,
    innovation_sd: Vec<f64>,
}

impl DurbinLevinson {
    pub fn new(acvf: &[f64]) -> Result<Self> {
        let len = acvf.len();
        if len == 0 {
            return Ok(DurbinLevinson {
                coeffs: Vec::new(),
                innovation_sd: Vec::new(),
            });
        }
        let mut coeffs = vec![0.0; len * (len - 1) / 2];
        let mut sd = Vec::with_capacity(len);
        let mut v = acvf[0];
        if !(v > 0.0) {
            return Err(invalid_param("autocovariance at lag 0 must be positive"));
        }
        sd.push(v.sqrt());
        for t in 1..len {
            let (done, rest) = coeffs.split_at_mut(t * (t - 1) / 2);
            let prev = &done[done.len() - (t - 1)..];
            let row = &mut rest[..t];
            let mut acc = acvf[t];
            for (j, phi) in prev.iter().enumerate() {
                acc -= phi * acvf[t - 1 - j];
            }
            let reflection = acc / v;
            for j in 0..t - 1 {
                row[j] = prev[j] - reflection * prev[t - 2 - j];
            }
            row[t - 1] = reflection;
            v *= 1.0 - reflection * reflection;
            if !(v > 0.0) {
                return Err(Error::NumericalDesign(format!(
                    "autocovariance not positive definite at step {t}"
                )));
            }
            sd.push(v.sqrt());
        }
        Ok(DurbinLevinson {
            coeffs,
            innovation_sd: sd,
        })
    }

    pub fn len(&self) -> usize {
        self.innovation_sd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.innovation_sd.is_empty()
    }

    pub fn sample(&self, s: &mut RngStream) -> Vec<f64> {
        let len = self.len();
        let mut x = Vec::with_capacity(len);
        for t in 0..len {
            // Row t holds phi_{t,1..t}; phi_{t,j} multiplies x[t - j].
            let row = &self.coeffs[t * t.saturating_sub(1) / 2..][..t];
            let pred: f64 = row.iter().zip(x.iter().rev()).map(|(p, v)| p * v).sum();
            x.push(pred + self.innovation_sd[t] * s.std_normal());
        }
        x
    }
}

/// FGN sampler for series of length `len`.
pub fn fgn_sampler(hurst: f64, sigma_y2: f64, len: usize) -> Result<CirculantSampler> {
    check_hurst(hurst)?;
    CirculantSampler::new(len, |k| fgn_acvf_unchecked(hurst, sigma_y2, k))
}

/// Discrete FBM path of length `len` from an FGN sampler of length `len - 1`.
pub(crate) fn fbm_from_fgn(fgn: &CirculantSampler, s: &mut RngStream) -> Vec<f64> {
    let increments = fgn.sample(s);
    let mut path = Vec::with_capacity(increments.len() + 1);
    let mut acc = 0.0;
    path.push(0.0);
    for y in increments {
        acc += y;
        path.push(acc);
    }
    path
}

/// Circulant embedding sampler for FDWN.
pub fn fdwn_circulant_sampler(d: f64, sigma_eps2: f64, len: usize) -> Result<CirculantSampler> {
    let m = (2 * len.max(1)).next_power_of_two();
    let acvf = fdwn_autocovariances(d, sigma_eps2, m / 2 + 1)?;
    CirculantSampler::new(len, |k| acvf[k])
}

/// Durbin-Levinson sampler for FDWN.
pub fn fdwn_levinson_sampler(d: f64, sigma_eps2: f64, len: usize) -> Result<DurbinLevinson> {
    DurbinLevinson::new(&fdwn_autocovariances(d, sigma_eps2, len)?)
}
