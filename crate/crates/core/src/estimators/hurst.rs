use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, Error, Result};

/// Whether a series holds increments (FGN) or a path (FBM).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HurstKind {
    Fgn,
    Fbm,
}

fn variation(path: &[f64], m: usize) -> f64 {
    let n = path.len() - 2 * m;
    let total: f64 = (0..n)
        .map(|t| {
            let v = path[t + 2 * m] - 2.0 * path[t + m] + path[t];
            v * v
        })
        .sum();
    total / n as f64
}

/// Discrete-variations estimate of the Hurst index from second-order
/// differences at dilations 1 and 2: `H = log2(V(2) / V(1)) / 2`.
///
/// FGN input is cumulatively summed into a path first, since its own second
/// differences do not follow the `m^{2H}` law.
pub fn hurst_discrete_variations(x: &[f64], kind: HurstKind) -> Result<f64> {
    if x.len() < 16 {
        return Err(invalid_input(format!("need at least 16 samples, got {}", x.len())));
    }
    let path: Vec<f64> = match kind {
        HurstKind::Fbm => x.to_vec(),
        HurstKind::Fgn => x
            .iter()
            .scan(0.0, |acc, &v| {
                *acc += v;
                Some(*acc)
            })
            .collect(),
    };
    let v1 = variation(&path, 1);
    let v2 = variation(&path, 2);
    if !(v1 > 0.0) || !(v2 > 0.0) {
        return Err(Error::DegenerateInput(
            "second-order variations vanish; the series is constant or linear".into(),
        ));
    }
    Ok(0.5 * (v2 / v1).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{simulate_fbm, simulate_fgn, Fbm, Fgn};
    use crate::variates::derive_stream;
    use proptest::prelude::*;

    /// Oracle: expected second-order variation of an FBM path from the
    /// covariance `(|s|^{2H} + |t|^{2H} - |s-t|^{2H}) / 2`.
    fn expected_variation(h: f64, m: usize) -> f64 {
        let cov = |s: f64, t: f64| 0.5 * (s.abs().powf(2.0 * h) + t.abs().powf(2.0 * h) - (s - t).abs().powf(2.0 * h));
        let t0 = 100.0;
        let m = m as f64;
        let pts = [t0 + 2.0 * m, t0 + m, t0];
        let w = [1.0, -2.0, 1.0];
        let mut v = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                v += w[i] * w[j] * cov(pts[i], pts[j]);
            }
        }
        v
    }

    #[test]
    fn expectation_ratio_recovers_h() {
        for h in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let r = expected_variation(h, 2) / expected_variation(h, 1);
            assert!((0.5 * r.log2() - h).abs() < 1e-9, "H={h}");
            let closed = (4.0 - 2f64.powf(2.0 * h)) * 2f64.powf(2.0 * h);
            assert!((expected_variation(h, 2) / closed - 1.0).abs() < 1e-9);
        }
        assert!((expected_variation(0.5, 2) / expected_variation(0.5, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn brownian_path_gives_one_half() {
        let mut total = 0.0;
        let n = 512;
        for i in 0..n {
            let mut s = derive_stream(41, i);
            let x: Vec<f64> = (0..4096).map(|_| s.std_normal()).collect();
            total += hurst_discrete_variations(&x, HurstKind::Fgn).unwrap();
        }
        let mean = total / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn recovers_simulated_hurst() {
        for h in [0.2, 0.8] {
            let (mut fgn_total, mut fbm_total) = (0.0, 0.0);
            let n = 256;
            for i in 0..n {
                let mut s = derive_stream(7, i);
                let x = simulate_fgn(&Fgn { hurst: h, sigma_y2: 1.0 }, 4096, &mut s).unwrap();
                fgn_total += hurst_discrete_variations(&x, HurstKind::Fgn).unwrap();
                let b = simulate_fbm(&Fbm { hurst: h, sigma_y2: 1.0 }, 4096, &mut s).unwrap();
                fbm_total += hurst_discrete_variations(&b, HurstKind::Fbm).unwrap();
            }
            assert!((fgn_total / n as f64 - h).abs() < 0.02);
            assert!((fbm_total / n as f64 - h).abs() < 0.02);
        }
    }

    #[test]
    fn constant_input_is_degenerate() {
        assert!(matches!(
            hurst_discrete_variations(&[3.0; 64], HurstKind::Fbm),
            Err(Error::DegenerateInput(_))
        ));
        assert!(hurst_discrete_variations(&[1.0; 8], HurstKind::Fbm).is_err());
    }

    proptest! {
        #[test]
        fn affine_invariance(seed in 0u64..1000, a in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], b in -100.0f64..100.0) {
            let mut s = derive_stream(seed, 0);
            let x: Vec<f64> = (0..256).map(|_| s.std_normal()).collect();
            let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let hx = hurst_discrete_variations(&x, HurstKind::Fbm).unwrap();
            let hy = hurst_discrete_variations(&y, HurstKind::Fbm).unwrap();
            prop_assert!((hx - hy).abs() < 1e-9);
        }
    }
}
