//! Characteristic-parameter estimators, one per noise model.

mod em;
mod hurst;
mod sas;
mod shot;
mod whittle;

use rayon::prelude::*;

pub use em::{bg_fit_em, bg_fit_em_traced, BgFit};
pub use hurst::{hurst_discrete_variations, HurstKind};
pub use sas::{sas_fit_from_log_moments, sas_fit_logmoments, SasFit};
pub use shot::shot_event_rate;
pub use whittle::fdwn_d_whittle;

use crate::dataset::TimeSeriesDataset;
use crate::error::Result;

/// Applies `estimator` to every series of `ds` in parallel, keeping series
/// order.
pub fn estimate_each<T, F>(ds: &TimeSeriesDataset, estimator: F) -> Vec<Result<T>>
where
    T: Send,
    F: Fn(&[f64]) -> Result<T> + Sync,
{
    (0..ds.n_series()).into_par_iter().map(|i| estimator(ds.series(i))).collect()
}
