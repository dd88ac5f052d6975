//! Discrete prolate spheroidal (Slepian) sequences.
//!
//! Tapers are eigenvectors of the symmetric tridiagonal matrix that commutes
//! with the time-frequency concentration operator; eigenvalues of that
//! tridiagonal are found by Sturm-sequence bisection and the vectors by
//! inverse iteration. Concentration ratios are then evaluated directly as the
//! quadratic form of the sinc kernel.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid_param, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DpssSet {
    /// `k` unit-norm tapers of length `n`.
    pub tapers: Vec<Vec<f64>>,
    /// Concentration ratio of each taper in `[-W, W]`, decreasing.
    pub eigenvalues: Vec<f64>,
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    off: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let prev = if q == 0.0 { f64::EPSILON * self.off[i - 1].abs().max(1.0) } else { q };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Eigenvalue of ascending rank `rank` by bisection.
    fn eigenvalue(&self, rank: usize, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > rank {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T - shift I) y = b` in place by Gaussian elimination with
    /// partial pivoting.
    fn solve_shifted(&self, shift: f64, b: &mut [f64]) {
        let n = self.diag.len();
        let tiny = f64::EPSILON * self.diag.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - shift).collect();
        let mut dl = self.off.clone();
        let mut du = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for i in 0..n - 1 {
            if swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            } else {
                b[i + 1] -= dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Concentration `v' A v` with `A[i][j] = sin(2 pi W (i-j)) / (pi (i-j))`,
/// evaluated through the autocorrelation of `v`.
fn concentration(v: &[f64], w: f64, planner: &mut FftPlanner<f64>) -> f64 {
    let n = v.len();
    let m = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    buf.resize(m, Complex64::new(0.0, 0.0));
    planner.plan_fft_forward(m).process(&mut buf);
    buf.iter_mut().for_each(|c| *c = Complex64::new(c.norm_sqr(), 0.0));
    planner.plan_fft_inverse(m).process(&mut buf);
    let r = |k: usize| buf[k].re / m as f64;
    let mut total = 2.0 * w * r(0);
    for k in 1..n {
        let kf = k as f64;
        total += 2.0 * (2.0 * PI * w * kf).sin() / (PI * kf) * r(k);
    }
    total
}

/// The first `k` Slepian tapers of length `n` with time half-bandwidth `nw`.
pub fn dpss(n: usize, nw: f64, k: usize) -> Result<DpssSet> {
    if !(nw > 0.0) {
        return Err(invalid_param(format!("time half-bandwidth must be positive, got {nw}")));
    }
    if k == 0 || k as f64 > 2.0 * nw - 1.0 {
        return Err(invalid_param(format!("taper count {k} must lie in 1..=2NW-1 = {}", 2.0 * nw - 1.0)));
    }
    if !(2.0 * nw - 1.0 < n as f64) || n < 2 {
        return Err(invalid_param(format!("series length {n} too short for NW = {nw}")));
    }
    let w = nw / n as f64;
    let half = (n as f64 - 1.0) / 2.0;
    let cos_w = (2.0 * PI * w).cos();
    let tri = Tridiagonal {
        diag: (0..n).map(|t| (half - t as f64).powi(2) * cos_w).collect(),
        off: (1..n).map(|t| t as f64 * (n - t) as f64 / 2.0).collect(),
    };
    let (lo, hi) = tri.gershgorin();

    let mut planner = FftPlanner::new();
    let mut tapers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut eigenvalues = Vec::with_capacity(k);
    for order in 0..k {
        let theta = tri.eigenvalue(n - 1 - order, lo, hi);
        // Nudge the shift off the eigenvalue so the solve stays finite.
        let shift = theta + (hi - lo) * 1e-14;
        let mut v: Vec<f64> = (0..n).map(|t| 1.0 + 0.01 * ((t * (order + 3)) % 7) as f64).collect();
        for _ in 0..3 {
            tri.solve_shifted(shift, &mut v);
            for prev in &tapers {
                let dot: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(prev).for_each(|(x, p)| *x -= dot * p);
            }
            normalize(&mut v);
        }

        if order % 2 == 0 {
            if v.iter().sum::<f64>() < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        } else {
            let thresh = (1.0 / n as f64).max(1e-7);
            if let Some(first) = v.iter().find(|x| *x * *x > thresh) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
        }
        eigenvalues.push(concentration(&v, w, &mut planner));
        tapers.push(v);
    }
    Ok(DpssSet { tapers, eigenvalues })
}
