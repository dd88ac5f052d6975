//! Filtered Poisson (shot) noise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result};
use crate::variates::RngStream;

/// Pulse values below this fraction of the peak are treated as zero.
const SUPPORT_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    /// `exp(-t/s) u(t) / s`
    OneSidedExponential,
    /// `t exp(-t/s) u(t) / s^2`
    LinearExponential,
    /// `exp(-t^2 / 2s^2) / (s sqrt(2 pi))`
    Gaussian,
}

impl PulseShape {
    pub const ALL: [PulseShape; 3] = [
        PulseShape::OneSidedExponential,
        PulseShape::LinearExponential,
        PulseShape::Gaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PulseShape::OneSidedExponential => "one_sided_exponential",
            PulseShape::LinearExponential => "linear_exponential",
            PulseShape::Gaussian => "gaussian",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            PulseShape::OneSidedExponential => "exp",
            PulseShape::LinearExponential => "linexp",
            PulseShape::Gaussian => "gauss",
        }
    }

    pub fn parse(s: &str) -> Option<PulseShape> {
        PulseShape::ALL
            .into_iter()
            .find(|p| p.name() == s || p.short_name() == s)
    }

    /// Interval outside of which the pulse is below the cutoff, in units of
    /// time.
    fn support(self, sigma_d: f64) -> (f64, f64) {
        let ln_cut = -SUPPORT_CUTOFF.ln();
        match self {
            PulseShape::OneSidedExponential => (0.0, sigma_d * ln_cut),
            PulseShape::LinearExponential => {
                // Solve u * exp(1 - u) = cutoff for u > 1.
                let mut u = ln_cut + 1.0;
                for _ in 0..50 {
                    let g = u.ln() + 1.0 - u + ln_cut;
                    u -= g / (1.0 / u - 1.0);
                }
                (0.0, sigma_d * u)
            }
            PulseShape::Gaussian => {
                let half = sigma_d * (2.0 * ln_cut).sqrt();
                (-half, half)
            }
        }
    }
}

/// Pulse function `p(t)` for duration parameter `sigma_d`.
pub fn pulse_value(shape: PulseShape, sigma_d: f64, t: f64) -> f64 {
    match shape {
        PulseShape::OneSidedExponential => {
            if t >= 0.0 {
                (-t / sigma_d).exp() / sigma_d
            } else {
                0.0
            }
        }
        PulseShape::LinearExponential => {
            if t >= 0.0 {
                t / (sigma_d * sigma_d) * (-t / sigma_d).exp()
            } else {
                0.0
            }
        }
        PulseShape::Gaussian => (-t * t / (2.0 * sigma_d * sigma_d)).exp() / (sigma_d * (2.0 * PI).sqrt()),
    }
}

/// Closed-form `(integral of p, integral of p^2)`.
pub fn pulse_integrals(shape: PulseShape, sigma_d: f64) -> (f64, f64) {
    match shape {
        PulseShape::OneSidedExponential => (1.0, 1.0 / (2.0 * sigma_d)),
        PulseShape::LinearExponential => (1.0, 1.0 / (4.0 * sigma_d)),
        PulseShape::Gaussian => (1.0, 1.0 / (2.0 * sigma_d * PI.sqrt())),
    }
}

/// Minimum simulated duration, in pulse durations.
pub(crate) const MIN_DURATION_RATIO: f64 = 100.0;

/// Simulates a steady-state shot noise series of length `len`.
///
/// A process of `2 * len` samples on the grid `t_m = m * dt` is built from
/// `N ~ Poisson(nu * T)` events with `T = (2 len - 1) dt`, event times uniform
/// on `[0, T]` and exponential amplitudes of mean `beta`; pulses are summed
/// directly at the grid points. The first `len` samples are discarded.
pub fn simulate_shot(
    nu: f64,
    beta: f64,
    sigma_d: f64,
    dt: f64,
    pulse: PulseShape,
    len: usize,
    s: &mut RngStream,
) -> Result<Vec<f64>> {
    let total = 2 * len;
    let duration = (total as f64 - 1.0) * dt;
    if duration < MIN_DURATION_RATIO * sigma_d {
        return Err(invalid_param(format!(
            "simulated duration {duration} must be at least {MIN_DURATION_RATIO} pulse durations ({sigma_d})"
        )));
    }
    let (t_lo, t_hi) = pulse.support(sigma_d);
    let n_events = s.poisson(nu * duration)?;
    let mut x = vec![0.0; len];
    let first = len as f64;
    let last = (total - 1) as f64;
    for _ in 0..n_events {
        let tau = s.uniform_range(0.0, duration);
        let amplitude = s.exponential_unchecked(beta);
        let m_lo = ((tau + t_lo) / dt).ceil().max(first);
        let m_hi = ((tau + t_hi) / dt).floor().min(last);
        if m_lo > m_hi {
            continue;
        }
        for m in m_lo as usize..=m_hi as usize {
            x[m - len] += amplitude * pulse_value(pulse, sigma_d, m as f64 * dt - tau);
        }
    }
    Ok(x)
}
