use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    bg_fit_em, fdwn_d_whittle, hurst_discrete_variations, sas_fit_logmoments, shot_event_rate, HurstKind,
};
use crate::noise::{NoiseSpec, PulseShape, DEFAULT_SERIES_LEN};

pub const DEFAULT_TRAIN_SIZE: usize = 16384;
pub const DEFAULT_TEST_SIZE: usize = 4096;

/// Hurst indices shared by the FDWN (`d = H - 1/2`), FGN and FBM grids.
pub const HURST_GRID: [f64; 11] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95];
pub const SHOT_RATES: [f64; 12] = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0];
pub const BG_PROBABILITIES: [f64; 12] = [0.01, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const SAS_ALPHAS: [f64; 11] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5];
pub const N_BANDS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCase {
    pub case_id: String,
    pub spec: NoiseSpec,
    pub train_size: usize,
    pub test_size: usize,
    pub series_len: usize,
}

impl BenchmarkCase {
    pub fn new(case_id: impl Into<String>, spec: NoiseSpec) -> Self {
        BenchmarkCase {
            case_id: case_id.into(),
            spec,
            train_size: DEFAULT_TRAIN_SIZE,
            test_size: DEFAULT_TEST_SIZE,
            series_len: DEFAULT_SERIES_LEN,
        }
    }
}

/// Passband `[0.025 + 0.05 i, 0.075 + 0.05 i]` of band `i`.
pub fn band_edges(i: usize) -> (f64, f64) {
    // Written over a common denominator so the edges are correctly rounded.
    let i = i as f64;
    ((1.0 + 2.0 * i) / 40.0, (3.0 + 2.0 * i) / 40.0)
}

/// The 100-case benchmark battery.
pub fn builtin_suite() -> Vec<BenchmarkCase> {
    let mut cases = Vec::with_capacity(100);
    let push = |cases: &mut Vec<BenchmarkCase>, id: String, spec: Result<NoiseSpec>| {
        cases.push(BenchmarkCase::new(id, spec.expect("built-in grid values are valid")));
    };
    for i in 0..N_BANDS {
        let (lo, hi) = band_edges(i);
        push(&mut cases, format!("band_limited_{lo:.3}_{hi:.3}"), NoiseSpec::band_limited(lo, hi));
    }
    for &h in &HURST_GRID {
        push(&mut cases, format!("fdwn_h{h:.2}"), NoiseSpec::fdwn(h - 0.5));
    }
    for &h in &HURST_GRID {
        push(&mut cases, format!("fgn_h{h:.2}"), NoiseSpec::fgn(h));
    }
    for &h in &HURST_GRID {
        push(&mut cases, format!("fbm_h{h:.2}"), NoiseSpec::fbm(h));
    }
    for pulse in PulseShape::ALL {
        for &nu in &SHOT_RATES {
            push(&mut cases, format!("shot_{}_nu{nu:.2}", pulse.short_name()), NoiseSpec::shot(nu, pulse));
        }
    }
    for &p in &BG_PROBABILITIES {
        push(&mut cases, format!("bg_p{p:.2}"), NoiseSpec::bg(p));
    }
    for &alpha in &SAS_ALPHAS {
        push(&mut cases, format!("sas_alpha{alpha:.1}"), NoiseSpec::sas(alpha));
    }
    cases
}

/// Names of the characteristic parameters recovered for a model, in report
/// order. Band-limited noise has none.
pub fn param_names(spec: &NoiseSpec) -> &'static [&'static str] {
    match spec {
        NoiseSpec::BandLimited(_) => &[],
        NoiseSpec::Fdwn(_) => &["d"],
        NoiseSpec::Fgn(_) | NoiseSpec::Fbm(_) => &["H"],
        NoiseSpec::Shot(_) => &["nu"],
        NoiseSpec::Bg(_) => &["p", "theta"],
        NoiseSpec::Sas(_) => &["alpha", "gamma"],
    }
}

/// True values of the parameters named by [`param_names`].
pub fn true_params(spec: &NoiseSpec) -> Vec<f64> {
    match *spec {
        NoiseSpec::BandLimited(_) => vec![],
        NoiseSpec::Fdwn(f) => vec![f.d],
        NoiseSpec::Fgn(f) => vec![f.hurst],
        NoiseSpec::Fbm(f) => vec![f.hurst],
        NoiseSpec::Shot(s) => vec![s.nu],
        NoiseSpec::Bg(b) => vec![b.p, b.theta()],
        NoiseSpec::Sas(s) => vec![s.alpha, s.gamma],
    }
}

/// Runs the model's estimator on one series, returning values in
/// [`param_names`] order. Non-finite estimates count as failures.
pub fn estimate_params(spec: &NoiseSpec, x: &[f64]) -> Result<Vec<f64>> {
    let values = match *spec {
        NoiseSpec::BandLimited(_) => vec![],
        NoiseSpec::Fdwn(_) => vec![fdwn_d_whittle(x)?],
        NoiseSpec::Fgn(_) => vec![hurst_discrete_variations(x, HurstKind::Fgn)?],
        NoiseSpec::Fbm(_) => vec![hurst_discrete_variations(x, HurstKind::Fbm)?],
        NoiseSpec::Shot(s) => vec![shot_event_rate(x, s.pulse, s.sigma_d)?],
        NoiseSpec::Bg(_) => {
            let fit = bg_fit_em(x)?;
            vec![fit.p_hat, fit.theta_hat]
        }
        NoiseSpec::Sas(_) => {
            let fit = sas_fit_logmoments(x)?;
            vec![fit.alpha_hat, fit.gamma_hat]
        }
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("non-finite estimate".into()));
    }
    Ok(values)
}
