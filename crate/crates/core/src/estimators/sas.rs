use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const ALPHA_MIN: f64 = 0.05;
const ALPHA_MAX: f64 = 2.0;
/// Largest tolerated fraction of exactly-zero samples.
const MAX_ZERO_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SasFit {
    pub alpha_hat: f64,
    /// Dispersion: the characteristic function is `exp(-gamma |t|^alpha)`.
    pub gamma_hat: f64,
    /// Set when the raw exponent estimate fell outside `(0.05, 2]`.
    pub clamped: bool,
}

/// Closed-form fit from the first two moments of `ln|x|`:
/// `Var = pi^2/12 (1 + 2/alpha^2)` and
/// `E = C_e (1/alpha - 1) + ln(gamma) / alpha`.
pub fn sas_fit_from_log_moments(mean: f64, var: f64) -> SasFit {
    let arg = 6.0 * var / (PI * PI) - 0.5;
    let (alpha, clamped) = if !(arg > 0.0) {
        (ALPHA_MAX, true)
    } else {
        let a = arg.powf(-0.5);
        if a > ALPHA_MAX {
            (ALPHA_MAX, true)
        } else if a <= ALPHA_MIN {
            (ALPHA_MIN, true)
        } else {
            (a, false)
        }
    };
    let gamma = (alpha * mean + EULER_GAMMA * (alpha - 1.0)).exp();
    SasFit { alpha_hat: alpha, gamma_hat: gamma, clamped }
}

/// Log-moment estimate of the SαS exponent and dispersion. Exact zeros are
/// dropped before taking logarithms; more than 1% zeros is an error.
pub fn sas_fit_logmoments(x: &[f64]) -> Result<SasFit> {
    let logs: Vec<f64> = x.iter().filter(|v| **v != 0.0).map(|v| v.abs().ln()).collect();
    let zeros = x.len() - logs.len();
    if x.len() < 2 || logs.len() < 2 {
        return Err(invalid_input("need at least two nonzero samples"));
    }
    if zeros as f64 > MAX_ZERO_FRACTION * x.len() as f64 {
        return Err(invalid_input(format!("{zeros} of {} samples are zero", x.len())));
    }
    if logs.iter().any(|v| !v.is_finite()) {
        return Err(invalid_input("non-finite sample"));
    }
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok(sas_fit_from_log_moments(mean, var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variates::derive_stream;
    use proptest::prelude::*;

    #[test]
    fn analytic_anchors_invert_exactly() {
        // Gaussian with variance 2: E ln|X| = (ln 4 - C_e - ln 2) / 2 ... via
        // ln|X| = ln sqrt(2) + ln|Z|, E ln|Z| = -(C_e + ln 2) / 2.
        let mean = 0.5 * 2f64.ln() - 0.5 * (EULER_GAMMA + 2f64.ln());
        let fit = sas_fit_from_log_moments(mean, PI * PI / 8.0);
        assert!((fit.alpha_hat - 2.0).abs() < 1e-12);
        assert!((fit.gamma_hat - 1.0).abs() < 1e-12);

        let fit = sas_fit_from_log_moments(0.0, PI * PI / 4.0);
        assert!((fit.alpha_hat - 1.0).abs() < 1e-12);
        assert!((fit.gamma_hat - 1.0).abs() < 1e-12);
        assert!(!fit.clamped);
    }

    #[test]
    fn cauchy_monte_carlo() {
        let mut s = derive_stream(12, 0);
        let x: Vec<f64> = (0..1_000_000).map(|_| (PI * (s.uniform() - 0.5)).tan()).collect();
        let fit = sas_fit_logmoments(&x).unwrap();
        assert!((fit.alpha_hat - 1.0).abs() < 0.02);
        assert!((fit.gamma_hat - 1.0).abs() < 0.02);
    }

    #[test]
    fn recovers_simulated_exponent() {
        let mut s = derive_stream(13, 0);
        let x: Vec<f64> = (0..1_000_000).map(|_| s.sas_standard(1.5).unwrap()).collect();
        let fit = sas_fit_logmoments(&x).unwrap();
        assert!((fit.alpha_hat - 1.5).abs() < 0.02, "{fit:?}");
        assert!((fit.gamma_hat - 1.0).abs() < 0.02, "{fit:?}");
    }

    #[test]
    fn clamping() {
        // Var(ln|x|) below pi^2/12 has no valid exponent.
        let fit = sas_fit_from_log_moments(0.0, 0.5);
        assert_eq!(fit.alpha_hat, 2.0);
        assert!(fit.clamped);
        let fit = sas_fit_from_log_moments(0.0, 1e6);
        assert_eq!(fit.alpha_hat, ALPHA_MIN);
        assert!(fit.clamped);
    }

    #[test]
    fn too_many_zeros() {
        let mut x = [1.0, -2.0, 3.0, 0.5].repeat(25);
        x[0] = 0.0;
        assert!(sas_fit_logmoments(&x).is_ok());
        x[1] = 0.0;
        assert!(sas_fit_logmoments(&x).is_err());
    }

    proptest! {
        #[test]
        fn dispersion_equivariance(seed in 0u64..500, c in 0.01f64..100.0) {
            let mut s = derive_stream(seed, 1);
            let x: Vec<f64> = (0..512).map(|_| s.sas_standard(1.2).unwrap()).collect();
            let y: Vec<f64> = x.iter().map(|v| c * v).collect();
            let fx = sas_fit_logmoments(&x).unwrap();
            let fy = sas_fit_logmoments(&y).unwrap();
            prop_assert!((fx.alpha_hat - fy.alpha_hat).abs() < 1e-9);
            prop_assume!(!fx.clamped);
            let expected = fx.gamma_hat * c.powf(fx.alpha_hat);
            prop_assert!((fy.gamma_hat / expected - 1.0).abs() < 1e-9);
        }
    }
}
