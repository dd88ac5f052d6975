//! Target noise-process simulators.
//!
//! [`NoiseSpec`] describes one of seven parameterized models. A [`Simulator`]
//! holds whatever a model needs precomputed for a given series length (filter
//! sections, embedding eigenvalues, prediction coefficients) and draws
//! independent series from per-series [`RngStream`]s.

mod butterworth;
mod power_law;
mod shot;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::TimeSeriesDataset;
use crate::error::{invalid_param, Result};
use crate::variates::{derive_stream, RngStream};

pub use butterworth::{butterworth_bandpass, zero_phase_filter, Biquad, SosCascade};
pub use power_law::{
    fdwn_autocovariance, fdwn_autocovariances, fdwn_circulant_sampler, fdwn_levinson_sampler,
    fgn_autocovariance, fgn_sampler, CirculantSampler, DurbinLevinson,
};
pub use shot::{pulse_integrals, pulse_value, simulate_shot, PulseShape};

/// Default series length.
pub const DEFAULT_SERIES_LEN: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandLimited {
    pub f_lo: f64,
    pub f_hi: f64,
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_order() -> usize {
    40
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fdwn {
    pub d: f64,
    #[serde(default = "one")]
    pub sigma_eps2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fgn {
    pub hurst: f64,
    #[serde(default = "one")]
    pub sigma_y2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fbm {
    pub hurst: f64,
    #[serde(default = "one")]
    pub sigma_y2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    pub nu: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one")]
    pub sigma_d: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub pulse: PulseShape,
}

fn default_dt() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bg {
    pub p: f64,
    #[serde(default = "default_sigma_w")]
    pub sigma_w: f64,
    #[serde(default = "one")]
    pub sigma_i: f64,
}

fn default_sigma_w() -> f64 {
    0.1
}

impl Bg {
    /// Scale ratio `sqrt(sigma_w^2 + sigma_i^2) / sigma_w`.
    pub fn theta(&self) -> f64 {
        (self.sigma_w.powi(2) + self.sigma_i.powi(2)).sqrt() / self.sigma_w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sas {
    pub alpha: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
}

/// One of the seven target noise models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum NoiseSpec {
    BandLimited(BandLimited),
    Fdwn(Fdwn),
    Fgn(Fgn),
    Fbm(Fbm),
    Shot(Shot),
    Bg(Bg),
    Sas(Sas),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid_param(format!("{name} must be positive and finite, got {v}")))
    }
}

impl NoiseSpec {
    pub fn band_limited(f_lo: f64, f_hi: f64) -> Result<Self> {
        NoiseSpec::BandLimited(BandLimited { f_lo, f_hi, order: 40 }).validated()
    }

    pub fn fdwn(d: f64) -> Result<Self> {
        NoiseSpec::Fdwn(Fdwn { d, sigma_eps2: 1.0 }).validated()
    }

    pub fn fgn(hurst: f64) -> Result<Self> {
        NoiseSpec::Fgn(Fgn { hurst, sigma_y2: 1.0 }).validated()
    }

    pub fn fbm(hurst: f64) -> Result<Self> {
        NoiseSpec::Fbm(Fbm { hurst, sigma_y2: 1.0 }).validated()
    }

    pub fn shot(nu: f64, pulse: PulseShape) -> Result<Self> {
        NoiseSpec::Shot(Shot {
            nu,
            beta: 1.0,
            sigma_d: 1.0,
            dt: 0.1,
            pulse,
        })
        .validated()
    }

    pub fn bg(p: f64) -> Result<Self> {
        NoiseSpec::Bg(Bg {
            p,
            sigma_w: 0.1,
            sigma_i: 1.0,
        })
        .validated()
    }

    pub fn sas(alpha: f64) -> Result<Self> {
        NoiseSpec::Sas(Sas {
            alpha,
            gamma: 1.0,
            delta: 0.0,
        })
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Checks every parameter range.
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::BandLimited(b) => {
                if !(b.f_lo > 0.0 && b.f_lo < b.f_hi && b.f_hi < 0.5) {
                    return Err(invalid_param(format!(
                        "band edges must satisfy 0 < f_lo < f_hi < 0.5, got ({}, {})",
                        b.f_lo, b.f_hi
                    )));
                }
                if b.order == 0 || b.order % 2 != 0 {
                    return Err(invalid_param(format!("filter order must be even, got {}", b.order)));
                }
                Ok(())
            }
            NoiseSpec::Fdwn(f) => {
                if !(f.d > -0.5 && f.d < 0.5) {
                    return Err(invalid_param(format!("d must lie in (-0.5, 0.5), got {}", f.d)));
                }
                positive("sigma_eps2", f.sigma_eps2)
            }
            NoiseSpec::Fgn(Fgn { hurst, sigma_y2 }) | NoiseSpec::Fbm(Fbm { hurst, sigma_y2 }) => {
                if !(hurst > 0.0 && hurst < 1.0) {
                    return Err(invalid_param(format!("Hurst index must lie in (0, 1), got {hurst}")));
                }
                positive("sigma_y2", sigma_y2)
            }
            NoiseSpec::Shot(s) => {
                positive("nu", s.nu)?;
                positive("beta", s.beta)?;
                positive("sigma_d", s.sigma_d)?;
                positive("dt", s.dt)
            }
            NoiseSpec::Bg(b) => {
                if !(0.0..=1.0).contains(&b.p) {
                    return Err(invalid_param(format!("impulse probability must lie in [0, 1], got {}", b.p)));
                }
                positive("sigma_w", b.sigma_w)?;
                positive("sigma_i", b.sigma_i)
            }
            NoiseSpec::Sas(s) => {
                if !(s.alpha > 0.0 && s.alpha <= 2.0) {
                    return Err(invalid_param(format!("alpha must lie in (0, 2], got {}", s.alpha)));
                }
                positive("gamma", s.gamma)?;
                if !s.delta.is_finite() {
                    return Err(invalid_param("delta must be finite"));
                }
                Ok(())
            }
        }
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            NoiseSpec::BandLimited(_) => "band_limited",
            NoiseSpec::Fdwn(_) => "fdwn",
            NoiseSpec::Fgn(_) => "fgn",
            NoiseSpec::Fbm(_) => "fbm",
            NoiseSpec::Shot(_) => "shot",
            NoiseSpec::Bg(_) => "bg",
            NoiseSpec::Sas(_) => "sas",
        }
    }

    /// Low-frequency PSD exponent `eta` (`S(f) ~ |f|^eta`) for the power law
    /// models, `None` otherwise.
    pub fn psd_exponent(&self) -> Option<f64> {
        match *self {
            NoiseSpec::Fdwn(f) => Some(-2.0 * f.d),
            NoiseSpec::Fgn(f) => Some(1.0 - 2.0 * f.hurst),
            NoiseSpec::Fbm(f) => Some(-(2.0 * f.hurst + 1.0)),
            _ => None,
        }
    }
}

/// Free-function form of [`NoiseSpec::psd_exponent`].
pub fn psd_exponent(spec: &NoiseSpec) -> Option<f64> {
    spec.psd_exponent()
}

/// How FDWN series are synthesized from their autocovariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FdwnMethod {
    #[default]
    DurbinLevinson,
    CirculantEmbedding,
}

#[derive(Debug, Clone)]
enum Prepared {
    BandLimited(SosCascade),
    FdwnLevinson(DurbinLevinson),
    FdwnCirculant(CirculantSampler),
    Fgn(CirculantSampler),
    Fbm(CirculantSampler),
    Shot(Shot),
    Bg(Bg),
    Sas(Sas),
}

/// A model prepared for a fixed series length.
#[derive(Debug, Clone)]
pub struct Simulator {
    spec: NoiseSpec,
    len: usize,
    prepared: Prepared,
}

impl Simulator {
    pub fn new(spec: &NoiseSpec, len: usize) -> Result<Self> {
        Self::with_fdwn_method(spec, len, FdwnMethod::default())
    }

    pub fn with_fdwn_method(spec: &NoiseSpec, len: usize, method: FdwnMethod) -> Result<Self> {
        spec.validate()?;
        let prepared = match *spec {
            NoiseSpec::BandLimited(b) => {
                let sos = butterworth_bandpass(b.order, b.f_lo, b.f_hi)?;
                if len <= 3 * b.order {
                    return Err(invalid_param(format!(
                        "series length {len} too short for order-{} zero-phase filtering",
                        b.order
                    )));
                }
                Prepared::BandLimited(sos)
            }
            NoiseSpec::Fdwn(f) => match method {
                FdwnMethod::DurbinLevinson => Prepared::FdwnLevinson(fdwn_levinson_sampler(f.d, f.sigma_eps2, len)?),
                FdwnMethod::CirculantEmbedding => {
                    Prepared::FdwnCirculant(fdwn_circulant_sampler(f.d, f.sigma_eps2, len)?)
                }
            },
            NoiseSpec::Fgn(f) => Prepared::Fgn(fgn_sampler(f.hurst, f.sigma_y2, len)?),
            NoiseSpec::Fbm(f) => Prepared::Fbm(fgn_sampler(f.hurst, f.sigma_y2, len.saturating_sub(1))?),
            NoiseSpec::Shot(s) => {
                let duration = (2.0 * len as f64 - 1.0) * s.dt;
                if duration < shot::MIN_DURATION_RATIO * s.sigma_d {
                    return Err(invalid_param(format!(
                        "shot duration {duration} shorter than {} pulse durations",
                        shot::MIN_DURATION_RATIO
                    )));
                }
                Prepared::Shot(s)
            }
            NoiseSpec::Bg(b) => Prepared::Bg(b),
            NoiseSpec::Sas(s) => Prepared::Sas(s),
        };
        Ok(Simulator {
            spec: *spec,
            len,
            prepared,
        })
    }

    pub fn spec(&self) -> &NoiseSpec {
        &self.spec
    }

    pub fn series_len(&self) -> usize {
        self.len
    }

    /// Draws one series.
    pub fn sample(&self, s: &mut RngStream) -> Result<Vec<f64>> {
        let len = self.len;
        match &self.prepared {
            Prepared::BandLimited(sos) => {
                let white: Vec<f64> = (0..len).map(|_| s.std_normal()).collect();
                zero_phase_filter(sos, &white)
            }
            Prepared::FdwnLevinson(dl) => Ok(dl.sample(s)),
            Prepared::FdwnCirculant(c) | Prepared::Fgn(c) => Ok(c.sample(s)),
            Prepared::Fbm(c) => {
                if len == 0 {
                    return Ok(Vec::new());
                }
                Ok(power_law::fbm_from_fgn(c, s))
            }
            Prepared::Shot(sh) => simulate_shot(sh.nu, sh.beta, sh.sigma_d, sh.dt, sh.pulse, len, s),
            Prepared::Bg(b) => Ok((0..len)
                .map(|_| {
                    let background = b.sigma_w * s.std_normal();
                    let gate = s.bernoulli(b.p);
                    let impulse = b.sigma_i * s.std_normal();
                    if gate {
                        background + impulse
                    } else {
                        background
                    }
                })
                .collect()),
            Prepared::Sas(sas) => {
                let scale = sas.gamma.powf(1.0 / sas.alpha);
                Ok((0..len)
                    .map(|_| sas.delta + scale * s.sas_standard_unchecked(sas.alpha))
                    .collect())
            }
        }
    }
}

/// White standard normal noise through a zero-phase Butterworth bandpass.
pub fn simulate_bandlimited(spec: &BandLimited, len: usize, s: &mut RngStream) -> Result<Vec<f64>> {
    Simulator::new(&NoiseSpec::BandLimited(*spec), len)?.sample(s)
}

pub fn simulate_fdwn(spec: &Fdwn, len: usize, s: &mut RngStream) -> Result<Vec<f64>> {
    Simulator::new(&NoiseSpec::Fdwn(*spec), len)?.sample(s)
}

pub fn simulate_fgn(spec: &Fgn, len: usize, s: &mut RngStream) -> Result<Vec<f64>> {
    Simulator::new(&NoiseSpec::Fgn(*spec), len)?.sample(s)
}

/// FBM path with `B[0] = 0` and FGN increments.
pub fn simulate_fbm(spec: &Fbm, len: usize, s: &mut RngStream) -> Result<Vec<f64>> {
    Simulator::new(&NoiseSpec::Fbm(*spec), len)?.sample(s)
}

pub fn simulate_bg(spec: &Bg, len: usize, s: &mut RngStream) -> Result<Vec<f64>> {
    Simulator::new(&NoiseSpec::Bg(*spec), len)?.sample(s)
}

pub fn simulate_sas_series(spec: &Sas, len: usize, s: &mut RngStream) -> Result<Vec<f64>> {
    Simulator::new(&NoiseSpec::Sas(*spec), len)?.sample(s)
}

/// Generates `n_series` series; series `i` uses `derive_stream(master_seed, i)`.
pub fn simulate_dataset(spec: &NoiseSpec, n_series: usize, len: usize, master_seed: u64) -> Result<TimeSeriesDataset> {
    let sim = Simulator::new(spec, len)?;
    simulate_with(&sim, 0..n_series, master_seed)
}

/// Generates the series with the given stream indices, in order.
pub fn simulate_with(
    sim: &Simulator,
    indices: std::ops::Range<usize>,
    master_seed: u64,
) -> Result<TimeSeriesDataset> {
    let n = indices.len();
    let rows = indices
        .into_par_iter()
        .map(|i| sim.sample(&mut derive_stream(master_seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut data = Vec::with_capacity(n * sim.len);
    for row in rows {
        data.extend_from_slice(&row);
    }
    TimeSeriesDataset::new(n, 1, sim.len, data)
}
