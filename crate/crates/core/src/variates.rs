//! Seeded random variate streams.
//!
//! Every series in a dataset draws from its own [`RngStream`], keyed by a
//! master seed and the series index. Two streams with the same key produce the
//! same sequence on the same build; streams with different keys are
//! independent, so datasets can be generated in any order or in parallel.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Open01, Poisson, StandardNormal};

use crate::error::{invalid_param, Result};

/// Below this distance from 1 the stable transform switches to its Cauchy limit.
const ALPHA_ONE_EPS: f64 = 1e-12;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A deterministic, independent stream of random variates.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha12Rng,
    master_seed: u64,
    stream_index: u64,
}

/// Derives the stream for `(master_seed, stream_index)`.
///
/// Both inputs pass through a splitmix64 avalanche before keying ChaCha12,
/// so adjacent indices land on unrelated keys.
pub fn derive_stream(master_seed: u64, stream_index: u64) -> RngStream {
    let mut state = splitmix64(master_seed ^ splitmix64(stream_index.wrapping_add(0x6a09_e667_f3bc_c909)));
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    RngStream {
        rng: ChaCha12Rng::from_seed(key),
        master_seed,
        stream_index,
    }
}

impl RngStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Raw 64 random bits, e.g. for deriving child seeds.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.random::<u64>()
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        Open01.sample(&mut self.rng)
    }

    /// Uniform on `[lo, hi)`.
    #[inline]
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.random::<f64>() < p
    }

    /// Exact standard normal variate (ziggurat).
    #[inline]
    pub fn std_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Exponential variate with mean `beta`, by inversion.
    pub fn exponential(&mut self, beta: f64) -> Result<f64> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid_param(format!("exponential mean must be positive, got {beta}")));
        }
        Ok(self.exponential_unchecked(beta))
    }

    #[inline]
    pub(crate) fn exponential_unchecked(&mut self, beta: f64) -> f64 {
        -beta * self.uniform().ln()
    }

    /// Poisson variate with mean `lam`.
    ///
    /// Small means use sequential inversion, larger ones the PTRS
    /// transformed-rejection sampler; both are exact.
    pub fn poisson(&mut self, lam: f64) -> Result<u64> {
        if !(lam >= 0.0 && lam.is_finite()) {
            return Err(invalid_param(format!("poisson mean must be nonnegative, got {lam}")));
        }
        if lam == 0.0 {
            return Ok(0);
        }
        let dist = Poisson::new(lam).map_err(|e| invalid_param(format!("poisson({lam}): {e}")))?;
        Ok(dist.sample(&mut self.rng) as u64)
    }

    /// Standard symmetric alpha-stable variate with characteristic function
    /// `exp(-|u|^alpha)`, via the Chambers-Mallows-Stuck transform.
    pub fn sas_standard(&mut self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(invalid_param(format!("alpha must lie in (0, 2], got {alpha}")));
        }
        Ok(self.sas_standard_unchecked(alpha))
    }

    #[inline]
    pub(crate) fn sas_standard_unchecked(&mut self, alpha: f64) -> f64 {
        let phi = FRAC_PI_2 * (2.0 * self.uniform() - 1.0);
        if (alpha - 1.0).abs() < ALPHA_ONE_EPS {
            return phi.tan();
        }
        let w = self.exponential_unchecked(1.0);
        let head = (alpha * phi).sin() / phi.cos().powf(1.0 / alpha);
        let tail = (((1.0 - alpha) * phi).cos() / w).powf((1.0 - alpha) / alpha);
        head * tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(xs: &[f64]) -> (f64, f64, f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        (mean, m2, m3 / m2.powf(1.5), m4 / (m2 * m2))
    }

    fn quantile(sorted: &[f64], p: f64) -> f64 {
        let pos = p * (sorted.len() - 1) as f64;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        sorted[i] + frac * (sorted[(i + 1).min(sorted.len() - 1)] - sorted[i])
    }

    #[test]
    fn same_key_same_sequence() {
        let mut a = derive_stream(42, 0);
        let mut b = derive_stream(42, 0);
        for _ in 0..100 {
            assert_eq!(a.std_normal().to_bits(), b.std_normal().to_bits());
        }
    }

    #[test]
    fn adjacent_streams_uncorrelated() {
        let mut a = derive_stream(42, 0);
        let mut b = derive_stream(42, 1);
        let xs: Vec<f64> = (0..10_000).map(|_| a.std_normal()).collect();
        let ys: Vec<f64> = (0..10_000).map(|_| b.std_normal()).collect();
        let (mx, vx, _, _) = moments(&xs);
        let (my, vy, _, _) = moments(&ys);
        let cov = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.len() as f64;
        assert!((cov / (vx * vy).sqrt()).abs() < 0.05);
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = derive_stream(42, 0);
        let mut b = derive_stream(43, 0);
        let same = (0..16).filter(|_| a.std_normal() == b.std_normal()).count();
        assert!(same < 16);
    }

    #[test]
    fn std_normal_moments() {
        let mut s = derive_stream(7, 3);
        let xs: Vec<f64> = (0..1_000_000).map(|_| s.std_normal()).collect();
        let (mean, var, skew, kurt) = moments(&xs);
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
        assert!(skew.abs() < 0.01, "skew {skew}");
        assert!((kurt - 3.0).abs() < 0.05, "kurt {kurt}");
    }

    #[test]
    fn exponential_moments_and_support() {
        let mut s = derive_stream(11, 0);
        let xs: Vec<f64> = (0..1_000_000).map(|_| s.exponential(1.0).unwrap()).collect();
        assert!(xs.iter().all(|&x| x >= 0.0));
        assert!((moments(&xs).0 - 1.0).abs() < 0.01);
        let ys: Vec<f64> = (0..1_000_000).map(|_| s.exponential(2.0).unwrap()).collect();
        assert!((moments(&ys).1 - 4.0).abs() < 0.05);
        assert!(s.exponential(0.0).is_err());
        assert!(s.exponential(-1.0).is_err());
    }

    #[test]
    fn poisson_degenerate_and_large() {
        let mut s = derive_stream(5, 9);
        assert!((0..1000).all(|_| s.poisson(0.0).unwrap() == 0));
        assert!(s.poisson(-0.5).is_err());
        let lam = 819.1;
        let xs: Vec<f64> = (0..100_000).map(|_| s.poisson(lam).unwrap() as f64).collect();
        let (mean, var, _, _) = moments(&xs);
        assert!((mean - lam).abs() < 1.0, "mean {mean}");
        assert!((var / mean - 1.0).abs() < 0.03, "var {var}");
    }

    #[test]
    fn sas_alpha_two_is_normal_with_variance_two() {
        let mut s = derive_stream(1, 2);
        let xs: Vec<f64> = (0..1_000_000).map(|_| s.sas_standard(2.0).unwrap()).collect();
        let (mean, var, _, kurt) = moments(&xs);
        assert!(mean.abs() < 0.01);
        assert!((var - 2.0).abs() < 0.02, "var {var}");
        assert!((kurt - 3.0).abs() < 0.05, "kurt {kurt}");
    }

    #[test]
    fn sas_alpha_one_is_cauchy() {
        let mut s = derive_stream(1, 3);
        let mut xs: Vec<f64> = (0..1_000_000).map(|_| s.sas_standard(1.0).unwrap()).collect();
        xs.sort_by(f64::total_cmp);
        assert!((quantile(&xs, 0.25) + 1.0).abs() < 0.02);
        assert!((quantile(&xs, 0.75) - 1.0).abs() < 0.02);
    }

    #[test]
    fn sas_characteristic_function_at_one() {
        let mut s = derive_stream(1, 4);
        let n = 1_000_000;
        let ecf = (0..n).map(|_| s.sas_standard(1.5).unwrap().cos()).sum::<f64>() / n as f64;
        assert!((ecf - (-1.0f64).exp()).abs() < 0.01, "ecf {ecf}");
    }

    #[test]
    fn sas_rejects_out_of_range_alpha() {
        let mut s = derive_stream(0, 0);
        assert!(s.sas_standard(0.0).is_err());
        assert!(s.sas_standard(2.01).is_err());
    }
}
