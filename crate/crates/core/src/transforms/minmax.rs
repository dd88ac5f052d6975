use serde::{Deserialize, Serialize};

use crate::dataset::TimeSeriesDataset;
use crate::error::{invalid_input, Result};

/// Per-feature affine map onto `[-1, 1]`. A feature is one position of the
/// flattened sample (channel and time index for a dataset).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    /// Fits over a set of samples that all have the same number of features.
    pub fn fit<'a>(samples: impl IntoIterator<Item = &'a [f64]>) -> Result<Self> {
        let mut iter = samples.into_iter();
        let first = iter.next().ok_or_else(|| invalid_input("cannot fit a scaler on no samples"))?;
        let mut min = first.to_vec();
        let mut max = first.to_vec();
        for s in iter {
            if s.len() != min.len() {
                return Err(invalid_input(format!("sample has {} features, expected {}", s.len(), min.len())));
            }
            for (j, &v) in s.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(MinMaxScaler { min, max })
    }

    pub fn fit_dataset(ds: &TimeSeriesDataset) -> Result<Self> {
        Self::fit(ds.iter_series())
    }

    pub fn n_features(&self) -> usize {
        self.min.len()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(invalid_input(format!("sample has {} features, expected {}", x.len(), self.n_features())));
        }
        Ok(())
    }

    /// Scales to `[-1, 1]`; constant features map to 0.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| if hi > lo { 2.0 * (v - lo) / (hi - lo) - 1.0 } else { 0.0 })
            .collect())
    }

    pub fn invert(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check(y)?;
        Ok(y.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| if hi > lo { lo + 0.5 * (v + 1.0) * (hi - lo) } else { lo })
            .collect())
    }

    fn map_dataset(&self, ds: &TimeSeriesDataset, f: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<TimeSeriesDataset> {
        let mut data = Vec::with_capacity(ds.as_slice().len());
        for s in ds.iter_series() {
            data.extend(f(s)?);
        }
        TimeSeriesDataset::new(ds.n_series(), ds.channels(), ds.series_len(), data)
    }

    pub fn apply_dataset(&self, ds: &TimeSeriesDataset) -> Result<TimeSeriesDataset> {
        self.map_dataset(ds, |s| self.apply(s))
    }

    pub fn invert_dataset(&self, ds: &TimeSeriesDataset) -> Result<TimeSeriesDataset> {
        self.map_dataset(ds, |s| self.invert(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn affine_example_and_constant_feature() {
        let rows: [&[f64]; 3] = [&[-2.0, 5.0], &[2.0, 5.0], &[0.0, 5.0]];
        let m = MinMaxScaler::fit(rows).unwrap();
        assert_eq!(m.apply(&[1.0, 5.0]).unwrap(), vec![0.5, 0.0]);
        assert_eq!(m.apply(&[-2.0, 5.0]).unwrap(), vec![-1.0, 0.0]);
        assert_eq!(m.invert(&[0.0, 0.0]).unwrap(), vec![0.0, 5.0]);
        assert!(m.apply(&[1.0]).is_err());
    }

    #[test]
    fn empty_fit_rejected() {
        assert!(MinMaxScaler::fit(std::iter::empty::<&[f64]>()).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_and_range(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 6), 1..20)) {
            let ds = TimeSeriesDataset::from_rows(&rows).unwrap();
            let m = MinMaxScaler::fit_dataset(&ds).unwrap();
            let scaled = m.apply_dataset(&ds).unwrap();
            prop_assert!(scaled.as_slice().iter().all(|v| (-1.0..=1.0).contains(v)));
            let back = m.invert_dataset(&scaled).unwrap();
            for (a, b) in back.as_slice().iter().zip(ds.as_slice()) {
                prop_assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
            }
        }
    }
}
