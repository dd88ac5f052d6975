use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, Error, Result};

const MAX_ITERS: usize = 500;
const LOGLIK_TOL: f64 = 1e-6;
/// Fits with an impulse weight outside `[FLAG_P, 1 - FLAG_P]` are flagged.
const FLAG_P: f64 = 0.01;

/// Two-component zero-mean Gaussian mixture fitted to a Bernoulli-Gaussian
/// series. The impulse component is the one with the larger variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BgFit {
    pub p_hat: f64,
    pub sigma_w_hat: f64,
    pub sigma_i_hat: f64,
    /// `sqrt(sigma_w^2 + sigma_i^2) / sigma_w`.
    pub theta_hat: f64,
    pub loglik: f64,
    pub iters: usize,
    /// Set when one component carries almost no weight, i.e. the data look
    /// like a single Gaussian.
    pub degenerate: bool,
}

struct Mixture {
    p: f64,
    v_small: f64,
    v_large: f64,
}

impl Mixture {
    /// Per-iteration constants of the two weighted log densities
    /// `c - x^2 k`: `(c_large, k_large, c_small, k_small)`.
    fn coefficients(&self) -> (f64, f64, f64, f64) {
        let half_ln_2pi = 0.5 * (2.0 * PI).ln();
        (
            self.p.ln() - 0.5 * self.v_large.ln() - half_ln_2pi,
            0.5 / self.v_large,
            (1.0 - self.p).ln() - 0.5 * self.v_small.ln() - half_ln_2pi,
            0.5 / self.v_small,
        )
    }

    /// Responsibility of the large component and the log mixture density.
    #[inline]
    fn posterior(coef: (f64, f64, f64, f64), x2: f64) -> (f64, f64) {
        let (ca, ka, cb, kb) = coef;
        let a = ca - x2 * ka;
        let b = cb - x2 * kb;
        if a >= b {
            let e = (b - a).exp();
            (1.0 / (1.0 + e), a + e.ln_1p())
        } else {
            let e = (a - b).exp();
            (e / (1.0 + e), b + e.ln_1p())
        }
    }

    /// One EM step. Returns the log-likelihood of the parameters it started
    /// from, and replaces them with the updated ones.
    fn step(&mut self, x2: &[f64]) -> f64 {
        let coef = self.coefficients();
        let (mut loglik, mut w_large, mut s_large, mut s_small) = (0.0, 0.0, 0.0, 0.0);
        for &v in x2 {
            let (r, ll) = Self::posterior(coef, v);
            loglik += ll;
            w_large += r;
            s_large += r * v;
            s_small += (1.0 - r) * v;
        }
        let n = x2.len() as f64;
        self.p = w_large / n;
        self.v_large = s_large / w_large;
        self.v_small = s_small / (n - w_large);
        loglik
    }

    fn loglik(&self, x2: &[f64]) -> f64 {
        let coef = self.coefficients();
        x2.iter().map(|&v| Self::posterior(coef, v).1).sum()
    }
}

/// EM fit of a zero-mean two-component Gaussian mixture, returning the fit and
/// the log-likelihood after every iteration.
pub fn bg_fit_em_traced(x: &[f64]) -> Result<(BgFit, Vec<f64>)> {
    if x.len() < 256 {
        return Err(invalid_input(format!("need at least 256 samples, got {}", x.len())));
    }
    let x2: Vec<f64> = x.iter().map(|v| v * v).collect();
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if !(var > 0.0) {
        return Err(Error::DegenerateInput("zero sample variance".into()));
    }
    let floor = 1e-12 * var;
    let mut mix = Mixture { p: 0.5, v_small: 0.1 * var, v_large: 10.0 * var };
    let mut trace = Vec::new();
    let mut iters = 0;
    while iters < MAX_ITERS {
        // `step` reports the log-likelihood of the parameters it started from.
        let ll = mix.step(&x2);
        iters += 1;
        if !(mix.v_small > floor && mix.v_large > floor) || !(mix.p > 0.0 && mix.p < 1.0) {
            return Err(Error::DegenerateFit(format!(
                "mixture component collapsed after {iters} iterations"
            )));
        }
        let converged = trace.last().is_some_and(|&prev: &f64| ll - prev < LOGLIK_TOL);
        trace.push(ll);
        if converged {
            break;
        }
    }
    trace.push(mix.loglik(&x2));
    let (p, v_w, v_big) = if mix.v_large >= mix.v_small {
        (mix.p, mix.v_small, mix.v_large)
    } else {
        (1.0 - mix.p, mix.v_large, mix.v_small)
    };
    let fit = BgFit {
        p_hat: p,
        sigma_w_hat: v_w.sqrt(),
        sigma_i_hat: (v_big - v_w).sqrt(),
        theta_hat: (v_big / v_w).sqrt(),
        loglik: *trace.last().unwrap_or(&f64::NAN),
        iters,
        degenerate: !(FLAG_P..=1.0 - FLAG_P).contains(&p),
    };
    Ok((fit, trace))
}

/// EM fit of a zero-mean two-component Gaussian mixture.
///
/// Starts from variances at 0.1 and 10 times the sample variance with equal
/// weights, and stops when the log-likelihood gain drops below `1e-6` or after
/// 500 iterations.
pub fn bg_fit_em(x: &[f64]) -> Result<BgFit> {
    bg_fit_em_traced(x).map(|(fit, _)| fit)
}
