//! Digital Butterworth bandpass design as second-order sections, and
//! forward-backward (zero-phase) filtering.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, invalid_param, Error, Result};

/// One biquad `(b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    fn response(&self, w: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -w);
        let z2 = z1 * z1;
        (self.b0 + self.b1 * z1 + self.b2 * z2) / (1.0 + self.a1 * z1 + self.a2 * z2)
    }

    /// Roots of `z^2 + a1 z + a2`.
    pub fn poles(&self) -> [Complex64; 2] {
        let disc = Complex64::new(self.a1 * self.a1 - 4.0 * self.a2, 0.0).sqrt();
        [(-self.a1 + disc) / 2.0, (-self.a1 - disc) / 2.0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosCascade {
    pub sections: Vec<Biquad>,
    pub gain: f64,
}

impl SosCascade {
    /// Final filter order (two per section).
    pub fn order(&self) -> usize {
        2 * self.sections.len()
    }

    /// Complex frequency response at digital frequency `f` (cycles/sample).
    pub fn response(&self, f: f64) -> Complex64 {
        let w = 2.0 * PI * f;
        self.sections
            .iter()
            .fold(Complex64::new(self.gain, 0.0), |acc, s| acc * s.response(w))
    }

    pub fn magnitude_db(&self, f: f64) -> f64 {
        20.0 * self.response(f).norm().log10()
    }

    pub fn max_pole_radius(&self) -> f64 {
        self.sections
            .iter()
            .flat_map(|s| s.poles())
            .map(|p| p.norm())
            .fold(0.0, f64::max)
    }

    /// Single forward pass (direct form II transposed), with optional
    /// per-section initial states.
    pub fn filter(&self, x: &[f64], init: Option<&[[f64; 2]]>) -> Vec<f64> {
        let mut y: Vec<f64> = x.iter().map(|v| v * self.gain).collect();
        for (i, s) in self.sections.iter().enumerate() {
            let [mut z1, mut z2] = init.map_or([0.0; 2], |zi| zi[i]);
            for v in y.iter_mut() {
                let input = *v;
                let out = s.b0 * input + z1;
                z1 = s.b1 * input - s.a1 * out + z2;
                z2 = s.b2 * input - s.a2 * out;
                *v = out;
            }
        }
        y
    }

    /// Steady-state section states for a unit-step input, so that filtering
    /// a constant from these states produces no transient.
    pub fn step_initial_states(&self) -> Vec<[f64; 2]> {
        let mut scale = self.gain;
        self.sections
            .iter()
            .map(|s| {
                let dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
                let zi = [scale * (dc - s.b0), scale * (s.b2 - s.a2 * dc)];
                scale *= dc;
                zi
            })
            .collect()
    }
}

/// Digital Butterworth bandpass of final order `order` (prototype order
/// `order / 2`), with passband edges `f_lo < f_hi` in cycles/sample.
///
/// Poles are obtained from the analog lowpass prototype through the
/// lowpass-to-bandpass map and a prewarped bilinear transform. Every section
/// carries one zero at `z = 1` and one at `z = -1` and is normalized to unit
/// gain at the band center; sections are ordered by increasing pole radius.
pub fn butterworth_bandpass(order: usize, f_lo: f64, f_hi: f64) -> Result<SosCascade> {
    if order == 0 || !order.is_multiple_of(2) {
        return Err(invalid_param(format!("bandpass order must be a positive even integer, got {order}")));
    }
    if !(f_lo > 0.0 && f_lo < f_hi && f_hi < 0.5) {
        return Err(invalid_param(format!("band edges must satisfy 0 < f_lo < f_hi < 0.5, got ({f_lo}, {f_hi})")));
    }
    let n = order / 2;
    let w_lo = 2.0 * (PI * f_lo).tan();
    let w_hi = 2.0 * (PI * f_hi).tan();
    let bw = w_hi - w_lo;
    let w0_sq = w_lo * w_hi;
    let f_center = (w0_sq.sqrt() / 2.0).atan() / PI;

    let mut poles = Vec::with_capacity(2 * n);
    for k in 0..n {
        let theta = PI * (2 * k + n + 1) as f64 / (2 * n) as f64;
        let proto = Complex64::from_polar(1.0, theta);
        let half = proto * (bw / 2.0);
        let root = (half * half - w0_sq).sqrt();
        for s in [half + root, half - root] {
            poles.push((2.0 + s) / (2.0 - s));
        }
    }

    let tol = 1e-10;
    let mut sections = Vec::with_capacity(n);
    let mut reals = Vec::new();
    for p in &poles {
        if p.im > tol {
            sections.push(Biquad {
                b0: 1.0,
                b1: 0.0,
                b2: -1.0,
                a1: -2.0 * p.re,
                a2: p.norm_sqr(),
            });
        } else if p.im.abs() <= tol {
            reals.push(p.re);
        }
    }
    for pair in reals.chunks(2) {
        let &[r1, r2] = pair else {
            return Err(Error::NumericalDesign("unpaired real pole".into()));
        };
        sections.push(Biquad {
            b0: 1.0,
            b1: 0.0,
            b2: -1.0,
            a1: -(r1 + r2),
            a2: r1 * r2,
        });
    }
    if sections.len() != n {
        return Err(Error::NumericalDesign(format!(
            "expected {n} sections, assembled {}",
            sections.len()
        )));
    }

    let wc = 2.0 * PI * f_center;
    for s in &mut sections {
        let g = 1.0 / s.response(wc).norm();
        s.b0 *= g;
        s.b2 *= g;
    }
    sections.sort_by(|a, b| a.a2.total_cmp(&b.a2));

    let mut cascade = SosCascade { sections, gain: 1.0 };
    cascade.gain = 1.0 / cascade.response(f_center).norm();

    let radius = cascade.max_pole_radius();
    if !(radius < 1.0) {
        return Err(Error::NumericalDesign(format!("unstable design, pole radius {radius}")));
    }
    Ok(cascade)
}

/// Forward-backward filtering with odd-reflection padding of `3 * order`
/// samples and steady-state initial conditions. The effective magnitude
/// response is `|H|^2` with zero phase; output length equals input length.
pub fn zero_phase_filter(sos: &SosCascade, x: &[f64]) -> Result<Vec<f64>> {
    let pad = 3 * sos.order();
    let n = x.len();
    if n <= pad {
        return Err(invalid_input(format!(
            "series of length {n} too short for zero-phase padding of {pad}"
        )));
    }
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

    let zi = sos.step_initial_states();
    let scaled = |v: f64| zi.iter().map(|z| [z[0] * v, z[1] * v]).collect::<Vec<_>>();

    let mut y = sos.filter(&ext, Some(&scaled(ext[0])));
    y.reverse();
    let mut y = sos.filter(&y, Some(&scaled(y[0])));
    y.reverse();
    Ok(y[pad..pad + n].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_edges_are_half_power() {
        let sos = butterworth_bandpass(40, 0.1, 0.15).unwrap();
        assert_eq!(sos.sections.len(), 20);
        for f in [0.1, 0.15] {
            let db = sos.magnitude_db(f);
            assert!((db + 3.0103).abs() < 0.1, "edge {f}: {db} dB");
        }
    }

    #[test]
    fn zeros_at_dc_and_nyquist() {
        for (lo, hi) in [(0.1, 0.15), (0.025, 0.075), (0.375, 0.425)] {
            let sos = butterworth_bandpass(40, lo, hi).unwrap();
            assert!(sos.magnitude_db(0.0) < -200.0);
            assert!(sos.magnitude_db(0.5) < -200.0);
        }
    }

    #[test]
    fn passband_is_monotone_from_center() {
        // Maximal flatness: magnitude rises monotonically from each edge to the
        // band center, without ripple.
        let sos = butterworth_bandpass(40, 0.1, 0.15).unwrap();
        let wl = 2.0 * (PI * 0.1).tan();
        let wh = 2.0 * (PI * 0.15).tan();
        let fc = ((wl * wh).sqrt() / 2.0).atan() / PI;
        let rising: Vec<f64> = (0..=200).map(|i| 0.1 + (fc - 0.1) * i as f64 / 200.0).collect();
        let falling: Vec<f64> = (0..=200).map(|i| fc + (0.15 - fc) * i as f64 / 200.0).collect();
        let mags = |fs: &[f64]| fs.iter().map(|&f| sos.response(f).norm()).collect::<Vec<_>>();
        assert!(mags(&rising).windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(mags(&falling).windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!((sos.response(fc).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poles_inside_unit_circle() {
        let sos = butterworth_bandpass(40, 0.025, 0.075).unwrap();
        assert!(sos.max_pole_radius() < 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(butterworth_bandpass(41, 0.1, 0.15).is_err());
        assert!(butterworth_bandpass(40, 0.15, 0.1).is_err());
        assert!(butterworth_bandpass(40, 0.0, 0.1).is_err());
        assert!(butterworth_bandpass(40, 0.1, 0.5).is_err());
    }

    #[test]
    fn odd_prototype_order_designs() {
        let sos = butterworth_bandpass(6, 0.1, 0.2).unwrap();
        assert_eq!(sos.sections.len(), 3);
        assert!((sos.magnitude_db(0.1) + 3.0103).abs() < 0.01);
    }

    #[test]
    fn impulse_response_is_symmetric() {
        let sos = butterworth_bandpass(40, 0.1, 0.15).unwrap();
        let n = 4097;
        let mut x = vec![0.0; n];
        x[n / 2] = 1.0;
        let y = zero_phase_filter(&sos, &x).unwrap();
        let peak = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 1..n / 2 {
            assert!((y[n / 2 + k] - y[n / 2 - k]).abs() < 1e-10 * peak.max(1.0), "lag {k}");
        }
    }

    fn sine_gain(sos: &SosCascade, f: f64) -> f64 {
        let n = 4096;
        let x: Vec<f64> = (0..n).map(|t| (2.0 * PI * f * t as f64).sin()).collect();
        let y = zero_phase_filter(sos, &x).unwrap();
        // Amplitude over the interior, away from the edges.
        let inner = &y[1024..3072];
        let xin = &x[1024..3072];
        let ey: f64 = inner.iter().map(|v| v * v).sum();
        let ex: f64 = xin.iter().map(|v| v * v).sum();
        (ey / ex).sqrt()
    }

    #[test]
    fn sinusoid_gain_in_band_and_at_edge() {
        let sos = butterworth_bandpass(40, 0.1, 0.15).unwrap();
        assert!((sine_gain(&sos, 0.125) - 1.0).abs() < 0.01);
        let edge_db = 20.0 * sine_gain(&sos, 0.1).log10();
        assert!((edge_db + 6.0206).abs() < 0.2, "edge {edge_db} dB");
    }

    #[test]
    fn short_series_rejected() {
        let sos = butterworth_bandpass(40, 0.1, 0.15).unwrap();
        assert!(zero_phase_filter(&sos, &vec![0.0; 120]).is_err());
        assert!(zero_phase_filter(&sos, &vec![0.0; 121]).is_ok());
    }
}
