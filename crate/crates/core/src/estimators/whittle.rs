use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid_input, Error, Result};

const D_LO: f64 = -0.49;
const D_HI: f64 = 0.49;
const TOL: f64 = 1e-4;

/// Periodogram ordinates `|X(f_j)|^2 / n` at Fourier frequencies
/// `f_j = j / n`, `j = 1..=floor((n - 1) / 2)`, together with
/// `ln(2 sin(pi f_j))`.
fn periodogram(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let m = (n - 1) / 2;
    let ordinates = (1..=m).map(|j| buf[j].norm_sqr() / n as f64).collect();
    let log_sines = (1..=m)
        .map(|j| (2.0 * (PI * j as f64 / n as f64).sin()).ln())
        .collect();
    (ordinates, log_sines)
}

/// Whittle objective with the innovation variance profiled out:
/// `ln(mean(I_j / g_j)) + mean(ln g_j)`, `g_j = (2 sin pi f_j)^{-2d}`.
fn objective(d: f64, ordinates: &[f64], log_sines: &[f64]) -> f64 {
    let m = ordinates.len() as f64;
    let scale: f64 = ordinates
        .iter()
        .zip(log_sines)
        .map(|(i, c)| i * (2.0 * d * c).exp())
        .sum::<f64>()
        / m;
    let mean_log_g = -2.0 * d * log_sines.iter().sum::<f64>() / m;
    scale.ln() + mean_log_g
}

/// Whittle estimate of the fractional difference parameter `d` of an FDWN
/// series, by golden-section search on `(-0.49, 0.49)`.
pub fn fdwn_d_whittle(x: &[f64]) -> Result<f64> {
    if x.len() < 128 {
        return Err(invalid_input(format!("need at least 128 samples, got {}", x.len())));
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Error::DegenerateInput("constant series".into()));
    }
    let (ordinates, log_sines) = periodogram(x);
    let f = |d: f64| objective(d, &ordinates, &log_sines);

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (D_LO, D_HI);
    let mut c = b - inv_phi * (b - a);
    let mut e = a + inv_phi * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    while b - a > TOL {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = f(e);
        }
    }
    let d = 0.5 * (a + b);
    if d - D_LO < TOL || D_HI - d < TOL {
        return Err(Error::NoConvergence(format!("Whittle search ran into the boundary at d = {d:.4}")));
    }
    Ok(d)
}
