use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::suite::{estimate_params, param_names};
use crate::dataset::TimeSeriesDataset;
use crate::error::{invalid_input, Result};
use crate::estimators::estimate_each;
use crate::noise::NoiseSpec;
use crate::spectral::{geodesic_distance, Multitaper, MultitaperConfig, PsdEstimate};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Five-number summary with Tukey whiskers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Smallest value at or above `q1 - 1.5 IQR`.
    pub whisker_lo: f64,
    /// Largest value at or below `q3 + 1.5 IQR`.
    pub whisker_hi: f64,
    pub n: usize,
}

impl BoxplotSummary {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Quantile of sorted data by linear interpolation between order statistics.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn boxplot_summary(values: &[f64]) -> Result<BoxplotSummary> {
    if values.is_empty() {
        return Err(invalid_input("cannot summarize an empty sample"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(invalid_input("sample contains NaN"));
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(|a, b| a.total_cmp(b));
    let q1 = quantile_sorted(&v, 0.25);
    let q3 = quantile_sorted(&v, 0.75);
    let iqr = q3 - q1;
    let (fence_lo, fence_hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let whisker_lo = *v.iter().find(|&&x| x >= fence_lo).unwrap_or(&v[0]);
    let whisker_hi = *v.iter().rev().find(|&&x| x <= fence_hi).unwrap_or(&v[v.len() - 1]);
    Ok(BoxplotSummary {
        min: v[0],
        q1,
        median: quantile_sorted(&v, 0.5),
        q3,
        max: v[v.len() - 1],
        whisker_lo: whisker_lo.min(q1),
        whisker_hi: whisker_hi.max(q3),
        n: v.len(),
    })
}

/// Estimator outcome over one dataset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimates {
    /// Per-parameter estimates from the series whose fit succeeded, in series
    /// order.
    pub values: BTreeMap<String, Vec<f64>>,
    /// Number of series whose fit failed.
    pub failures: usize,
    pub n_series: usize,
    /// Failure count by error category.
    pub failure_categories: BTreeMap<String, usize>,
}

impl ParamEstimates {
    pub fn failure_rate(&self) -> f64 {
        if self.n_series == 0 {
            0.0
        } else {
            self.failures as f64 / self.n_series as f64
        }
    }

    pub fn summaries(&self) -> BTreeMap<String, BoxplotSummary> {
        self.values
            .iter()
            .filter_map(|(k, v)| boxplot_summary(v).ok().map(|s| (k.clone(), s)))
            .collect()
    }
}

/// Runs the model's estimator on every series, skipping and counting
/// failures.
pub fn estimate_dataset(spec: &NoiseSpec, ds: &TimeSeriesDataset) -> ParamEstimates {
    let names = param_names(spec);
    let mut out = ParamEstimates {
        values: names.iter().map(|n| (n.to_string(), Vec::new())).collect(),
        n_series: ds.n_series(),
        ..Default::default()
    };
    if names.is_empty() {
        return out;
    }
    for result in estimate_each(ds, |x| estimate_params(spec, x)) {
        match result {
            Ok(vals) => {
                for (name, v) in names.iter().zip(vals) {
                    out.values.get_mut(*name).unwrap().push(v);
                }
            }
            Err(e) => {
                out.failures += 1;
                *out.failure_categories.entry(e.category().to_string()).or_default() += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub case_id: String,
    pub spec: NoiseSpec,
    pub multitaper: MultitaperConfig,
    pub series_len: usize,
    pub n_target: usize,
    pub n_generated: usize,
    pub seeds: Seeds,
    pub geodesic_distance: f64,
    /// True parameter values of the target model.
    pub true_params: BTreeMap<String, f64>,
    pub target_param_summary: BTreeMap<String, BoxplotSummary>,
    pub generated_param_summary: BTreeMap<String, BoxplotSummary>,
    pub target_failures: usize,
    pub generated_failures: usize,
    pub target_failure_rate: f64,
    pub generated_failure_rate: f64,
    pub median_psd_target: PsdEstimate,
    pub median_psd_generated: PsdEstimate,
    /// Raw per-series estimates, exported as CSV rather than in the report.
    #[serde(skip)]
    pub target_estimates: ParamEstimates,
    #[serde(skip)]
    pub generated_estimates: ParamEstimates,
}

/// Scores `generated` against `target`: geodesic distance between the median
/// multitaper PSDs and the distributions of the model's parameter estimates on
/// both datasets.
pub fn evaluate(
    target: &TimeSeriesDataset,
    generated: &TimeSeriesDataset,
    spec: &NoiseSpec,
    cfg: &MultitaperConfig,
) -> Result<EvalReport> {
    if target.is_empty() || generated.is_empty() {
        return Err(invalid_input("both datasets must be nonempty"));
    }
    if target.series_len() != generated.series_len() {
        return Err(invalid_input(format!(
            "series lengths differ: target {}, generated {}",
            target.series_len(),
            generated.series_len()
        )));
    }
    if target.channels() != 1 || generated.channels() != 1 {
        return Err(invalid_input("evaluation expects single-channel datasets"));
    }
    let mt = Multitaper::new(*cfg, target.series_len())?;
    let psd_t = mt.median_psd(target)?;
    let psd_g = mt.median_psd(generated)?;
    let distance = geodesic_distance(&psd_g, &psd_t)?;

    let est_t = estimate_dataset(spec, target);
    let est_g = estimate_dataset(spec, generated);
    let truth = param_names(spec)
        .iter()
        .map(|n| n.to_string())
        .zip(super::suite::true_params(spec))
        .collect();
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        case_id: String::new(),
        spec: *spec,
        multitaper: *cfg,
        series_len: target.series_len(),
        n_target: target.n_series(),
        n_generated: generated.n_series(),
        seeds: Seeds::default(),
        geodesic_distance: distance,
        true_params: truth,
        target_param_summary: est_t.summaries(),
        generated_param_summary: est_g.summaries(),
        target_failures: est_t.failures,
        generated_failures: est_g.failures,
        target_failure_rate: est_t.failure_rate(),
        generated_failure_rate: est_g.failure_rate(),
        median_psd_target: psd_t,
        median_psd_generated: psd_g,
        target_estimates: est_t,
        generated_estimates: est_g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{simulate_dataset, PulseShape};
    use crate::variates::derive_stream;
    use proptest::prelude::*;

    #[test]
    fn five_values() {
        let s = boxplot_summary(&[5.0, 1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        assert_eq!((s.whisker_lo, s.whisker_hi, s.n), (1.0, 5.0, 5));
    }

    #[test]
    fn outliers_beyond_whiskers() {
        let s = boxplot_summary(&[1.0, 2.0, 3.0, 4.0, 5.0, 100.0]).unwrap();
        // q1 = 2.25, q3 = 4.75, upper fence 8.5.
        assert_eq!((s.q1, s.q3), (2.25, 4.75));
        assert_eq!(s.whisker_hi, 5.0);
        assert_eq!(s.max, 100.0);
    }

    #[test]
    fn constant_and_empty() {
        let s = boxplot_summary(&[2.5; 7]).unwrap();
        assert!([s.min, s.q1, s.median, s.q3, s.max, s.whisker_lo, s.whisker_hi].iter().all(|&v| v == 2.5));
        assert!(boxplot_summary(&[]).is_err());
    }

    #[test]
    fn normal_quartile() {
        let mut st = derive_stream(6, 0);
        let x: Vec<f64> = (0..1_000_000).map(|_| st.std_normal()).collect();
        let s = boxplot_summary(&x).unwrap();
        assert!((s.q1 + 0.6745).abs() < 0.01);
        assert!((s.q3 - 0.6745).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn ordering_invariant(values in prop::collection::vec(-1e6f64..1e6, 1..200)) {
            let s = boxplot_summary(&values).unwrap();
            prop_assert!(s.min <= s.whisker_lo && s.whisker_lo <= s.q1 && s.q1 <= s.median);
            prop_assert!(s.median <= s.q3 && s.q3 <= s.whisker_hi && s.whisker_hi <= s.max);
        }
    }

    #[test]
    fn self_evaluation_is_exact() {
        let specs = [
            NoiseSpec::band_limited(0.1, 0.15).unwrap(),
            NoiseSpec::fdwn(0.2).unwrap(),
            NoiseSpec::fgn(0.7).unwrap(),
            NoiseSpec::fbm(0.3).unwrap(),
            NoiseSpec::shot(1.0, PulseShape::LinearExponential).unwrap(),
            NoiseSpec::bg(0.2).unwrap(),
            NoiseSpec::sas(1.2).unwrap(),
        ];
        let cfg = MultitaperConfig { nfft: 1024, ..Default::default() };
        for spec in specs {
            let ds = simulate_dataset(&spec, 16, 1024, 11).unwrap();
            let r = evaluate(&ds, &ds, &spec, &cfg).unwrap();
            assert_eq!(r.geodesic_distance, 0.0, "{spec:?}");
            assert_eq!(r.target_param_summary, r.generated_param_summary);
            assert_eq!(r.target_param_summary.len(), param_names(&spec).len());
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let spec = NoiseSpec::fgn(0.5).unwrap();
        let a = simulate_dataset(&spec, 4, 512, 1).unwrap();
        let b = simulate_dataset(&spec, 4, 256, 1).unwrap();
        assert!(evaluate(&a, &b, &spec, &MultitaperConfig { nfft: 512, ..Default::default() }).is_err());
        assert!(evaluate(&TimeSeriesDataset::empty(512), &a, &spec, &MultitaperConfig::default()).is_err());
    }

    #[test]
    fn failures_are_counted_not_fatal() {
        let spec = NoiseSpec::fbm(0.5).unwrap();
        let mut rows = vec![vec![1.0; 64]; 3];
        let mut st = derive_stream(1, 1);
        rows.push((0..64).map(|_| st.std_normal()).collect());
        let ds = TimeSeriesDataset::from_rows(&rows).unwrap();
        let est = estimate_dataset(&spec, &ds);
        assert_eq!(est.failures, 3);
        assert_eq!(est.values["H"].len(), 1);
        assert_eq!(est.failure_categories["degenerate-input"], 3);
        assert!((est.failure_rate() - 0.75).abs() < 1e-15);
    }
}
