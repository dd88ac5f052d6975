use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, invalid_param, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StftConfig {
    /// Hann window length.
    pub win_len: usize,
    /// Fraction of the window shared by neighbouring frames.
    pub overlap: f64,
}

impl Default for StftConfig {
    fn default() -> Self {
        StftConfig { win_len: 128, overlap: 0.5 }
    }
}

impl StftConfig {
    pub fn new(win_len: usize, overlap: f64) -> Self {
        StftConfig { win_len, overlap }
    }

    pub fn hop(&self) -> usize {
        (self.win_len as f64 * (1.0 - self.overlap)).round() as usize
    }

    pub fn freq_bins(&self) -> usize {
        self.win_len / 2 + 1
    }

    /// Frames for a signal of `len` samples, padded by half a window on each
    /// side.
    pub fn frames(&self, len: usize) -> usize {
        1 + len.div_ceil(self.hop())
    }

    /// Periodic Hann window.
    pub fn window(&self) -> Vec<f64> {
        let n = self.win_len as f64;
        (0..self.win_len).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n).cos()).collect()
    }

    /// Checks that the window overlap-adds to a constant at this hop.
    pub fn validate(&self) -> Result<()> {
        if self.win_len < 2 || !self.win_len.is_multiple_of(2) {
            return Err(invalid_param(format!("window length must be even and >= 2, got {}", self.win_len)));
        }
        if !(self.overlap >= 0.0 && self.overlap < 1.0) {
            return Err(invalid_param(format!("overlap must lie in [0, 1), got {}", self.overlap)));
        }
        let hop = self.hop();
        let exact = self.win_len as f64 * (1.0 - self.overlap);
        if hop == 0 || (exact - hop as f64).abs() > 1e-9 {
            return Err(invalid_param(format!("overlap {} gives a non-integer hop {exact}", self.overlap)));
        }
        let w = self.window();
        let sums: Vec<f64> = (0..hop).map(|n| w.iter().skip(n).step_by(hop).sum()).collect();
        let target = sums[0];
        if sums.iter().any(|s| (s - target).abs() > 1e-10 * target.abs().max(1.0)) {
            return Err(invalid_param(format!(
                "Hann window of length {} at hop {hop} does not satisfy constant overlap-add",
                self.win_len
            )));
        }
        Ok(())
    }
}

/// Real and imaginary parts of a one-sided STFT, laid out as
/// `[channel][bin][frame]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StftArray {
    pub freq_bins: usize,
    pub frames: usize,
    /// Length of the signal the transform was computed from.
    pub signal_len: usize,
    pub data: Vec<f64>,
}

impl StftArray {
    pub fn shape(&self) -> (usize, usize, usize) {
        (2, self.freq_bins, self.frames)
    }

    /// Channel 0 holds real parts, channel 1 imaginary parts.
    pub fn channel(&self, c: usize) -> &[f64] {
        let size = self.freq_bins * self.frames;
        &self.data[c * size..(c + 1) * size]
    }

    pub fn get(&self, c: usize, bin: usize, frame: usize) -> f64 {
        self.data[(c * self.freq_bins + bin) * self.frames + frame]
    }

    fn value(&self, bin: usize, frame: usize) -> Complex64 {
        Complex64::new(self.get(0, bin, frame), self.get(1, bin, frame))
    }

    pub(crate) fn map_channels(&self, f: impl Fn(usize, f64) -> f64) -> StftArray {
        let size = self.freq_bins * self.frames;
        StftArray {
            data: self.data.iter().enumerate().map(|(i, &v)| f(i / size, v)).collect(),
            ..self.clone()
        }
    }
}

/// Planned forward/inverse transforms for one configuration.
#[derive(Clone)]
pub struct Stft {
    cfg: StftConfig,
    window: Vec<f64>,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Stft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stft").field("cfg", &self.cfg).finish_non_exhaustive()
    }
}

impl Stft {
    pub fn new(cfg: StftConfig) -> Result<Self> {
        cfg.validate()?;
        let window = cfg.window();
        let scale = window.iter().sum::<f64>();
        let mut planner = FftPlanner::new();
        Ok(Stft {
            forward: planner.plan_fft_forward(cfg.win_len),
            inverse: planner.plan_fft_inverse(cfg.win_len),
            cfg,
            window,
            scale,
        })
    }

    pub fn config(&self) -> &StftConfig {
        &self.cfg
    }

    /// Padded signal: half a window of zeros in front, and enough behind for
    /// the last frame to be complete.
    fn padded_len(&self, len: usize) -> usize {
        (self.cfg.frames(len) - 1) * self.cfg.hop() + self.cfg.win_len
    }

    pub fn forward(&self, x: &[f64]) -> Result<StftArray> {
        if x.is_empty() {
            return Err(invalid_input("cannot transform an empty series"));
        }
        let (n, hop) = (self.cfg.win_len, self.cfg.hop());
        let frames = self.cfg.frames(x.len());
        let bins = self.cfg.freq_bins();
        let mut padded = vec![0.0; self.padded_len(x.len())];
        padded[n / 2..n / 2 + x.len()].copy_from_slice(x);

        let mut data = vec![0.0; 2 * bins * frames];
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for m in 0..frames {
            for (i, b) in buf.iter_mut().enumerate() {
                *b = Complex64::new(self.window[i] * padded[m * hop + i], 0.0);
            }
            self.forward.process(&mut buf);
            for k in 0..bins {
                let v = buf[k] / self.scale;
                data[k * frames + m] = v.re;
                data[(bins + k) * frames + m] = v.im;
            }
        }
        Ok(StftArray { freq_bins: bins, frames, signal_len: x.len(), data })
    }

    /// Weighted overlap-add inverse.
    pub fn inverse(&self, s: &StftArray) -> Result<Vec<f64>> {
        let (n, hop) = (self.cfg.win_len, self.cfg.hop());
        let bins = self.cfg.freq_bins();
        if s.freq_bins != bins || s.frames != self.cfg.frames(s.signal_len) || s.data.len() != 2 * bins * s.frames {
            return Err(invalid_input(format!(
                "STFT of shape 2x{}x{} for {} samples does not match window {n}, hop {hop}",
                s.freq_bins, s.frames, s.signal_len
            )));
        }
        let mut out = vec![0.0; self.padded_len(s.signal_len)];
        let mut norm = vec![0.0; out.len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for m in 0..s.frames {
            for (k, b) in buf.iter_mut().take(bins).enumerate() {
                *b = s.value(k, m) * self.scale;
            }
            // Hermitian extension; DC and Nyquist must be real.
            buf[0].im = 0.0;
            buf[n / 2].im = 0.0;
            for k in 1..n / 2 {
                buf[n - k] = buf[k].conj();
            }
            self.inverse.process(&mut buf);
            for i in 0..n {
                let w = self.window[i];
                out[m * hop + i] += w * buf[i].re / n as f64;
                norm[m * hop + i] += w * w;
            }
        }
        Ok((0..s.signal_len)
            .map(|t| {
                let idx = n / 2 + t;
                out[idx] / norm[idx]
            })
            .collect())
    }
}

pub fn stft(x: &[f64], cfg: &StftConfig) -> Result<StftArray> {
    Stft::new(*cfg)?.forward(x)
}

pub fn istft(s: &StftArray, cfg: &StftConfig) -> Result<Vec<f64>> {
    Stft::new(*cfg)?.inverse(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variates::derive_stream;
    use proptest::prelude::*;

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut s = derive_stream(seed, 0);
        (0..n).map(|_| s.std_normal()).collect()
    }

    #[test]
    fn shapes() {
        let x = noise(1, 4096);
        assert_eq!(stft(&x, &StftConfig::new(128, 0.5)).unwrap().shape(), (2, 65, 65));
        assert_eq!(stft(&x, &StftConfig::new(256, 0.75)).unwrap().shape(), (2, 129, 65));
    }

    #[test]
    fn perfect_reconstruction() {
        for (len, cfg) in [(4096, StftConfig::new(128, 0.5)), (4096, StftConfig::new(256, 0.75)), (1000, StftConfig::new(64, 0.5))] {
            let x = noise(2, len);
            let back = istft(&stft(&x, &cfg).unwrap(), &cfg).unwrap();
            let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let err = x.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert_eq!(back.len(), len);
            assert!(err / peak < 1e-9, "{cfg:?}: {err}");
        }
    }

    #[test]
    fn matches_direct_dft() {
        let cfg = StftConfig::new(16, 0.5);
        let x = noise(3, 50);
        let s = stft(&x, &cfg).unwrap();
        let w = cfg.window();
        let scale: f64 = w.iter().sum();
        let mut padded = vec![0.0; 8];
        padded.extend(&x);
        padded.resize(8 + 50 + 16, 0.0);
        for m in 0..s.frames {
            for k in 0..s.freq_bins {
                let (mut re, mut im) = (0.0, 0.0);
                for i in 0..16 {
                    let ang = -2.0 * PI * (k * i) as f64 / 16.0;
                    re += w[i] * padded[m * 8 + i] * ang.cos();
                    im += w[i] * padded[m * 8 + i] * ang.sin();
                }
                assert!((s.get(0, k, m) - re / scale).abs() < 1e-12);
                assert!((s.get(1, k, m) - im / scale).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn frame_energy_identity() {
        // Parseval per frame: sum_k c_k |X_k|^2 = N sum_n (w x)^2 / scale^2,
        // with c_k = 1 at DC and Nyquist and 2 elsewhere.
        let cfg = StftConfig::new(128, 0.5);
        let x = noise(4, 4096);
        let s = stft(&x, &cfg).unwrap();
        let w = cfg.window();
        let scale: f64 = w.iter().sum();
        let mut padded = vec![0.0; 64];
        padded.extend(&x);
        padded.resize(64 * 66, 0.0);
        for m in [0, 10, 64] {
            let spectral: f64 = (0..65)
                .map(|k| {
                    let c = if k == 0 || k == 64 { 1.0 } else { 2.0 };
                    c * (s.get(0, k, m).powi(2) + s.get(1, k, m).powi(2))
                })
                .sum();
            let temporal: f64 = (0..128).map(|i| (w[i] * padded[m * 64 + i]).powi(2)).sum::<f64>() * 128.0 / (scale * scale);
            assert!((spectral / temporal - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn non_cola_rejected() {
        assert!(StftConfig::new(128, 0.3).validate().is_err());
        assert!(StftConfig::new(128, 28.0 / 128.0).validate().is_err());
        assert!(StftConfig::new(128, 0.0).validate().is_err());
        assert!(StftConfig::new(128, 0.5).validate().is_ok());
        assert!(StftConfig::new(256, 0.75).validate().is_ok());
        assert!(StftConfig::new(127, 0.5).validate().is_err());
    }

    #[test]
    fn shape_mismatch_rejected() {
        let cfg = StftConfig::new(128, 0.5);
        let s = stft(&noise(5, 4096), &cfg).unwrap();
        assert!(istft(&s, &StftConfig::new(256, 0.75)).is_err());
    }

    proptest! {
        #[test]
        fn linearity(seed in 0u64..100, a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let cfg = StftConfig::new(64, 0.75);
            let x = noise(seed, 500);
            let y = noise(seed + 1000, 500);
            let z: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
            let (sx, sy, sz) = (stft(&x, &cfg).unwrap(), stft(&y, &cfg).unwrap(), stft(&z, &cfg).unwrap());
            for i in 0..sz.data.len() {
                prop_assert!((sz.data[i] - (a * sx.data[i] + b * sy.data[i])).abs() < 1e-10);
            }
        }
    }
}
