use crate::error::{invalid_input, Result};

/// A batch of equal-length real time series, stored row-major as
/// `series -> channel -> time`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesDataset {
    n_series: usize,
    channels: usize,
    series_len: usize,
    data: Vec<f64>,
}

impl TimeSeriesDataset {
    pub fn new(n_series: usize, channels: usize, series_len: usize, data: Vec<f64>) -> Result<Self> {
        let expected = n_series
            .checked_mul(channels)
            .and_then(|v| v.checked_mul(series_len))
            .ok_or_else(|| invalid_input("dataset dimensions overflow"))?;
        if data.len() != expected {
            return Err(invalid_input(format!(
                "dataset payload has {} values, expected {n_series}x{channels}x{series_len}",
                data.len()
            )));
        }
        if channels == 0 {
            return Err(invalid_input("dataset must have at least one channel"));
        }
        Ok(TimeSeriesDataset {
            n_series,
            channels,
            series_len,
            data,
        })
    }

    /// An empty single-channel dataset with the given series length.
    pub fn empty(series_len: usize) -> Self {
        TimeSeriesDataset {
            n_series: 0,
            channels: 1,
            series_len,
            data: Vec::new(),
        }
    }

    /// Builds a single-channel dataset from rows of equal length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Ok(Self::empty(0));
        };
        let len = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * len);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != len {
                return Err(invalid_input(format!("row {i} has length {}, expected {len}", row.len())));
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), 1, len, data)
    }

    pub fn n_series(&self) -> usize {
        self.n_series
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn series_len(&self) -> usize {
        self.series_len
    }

    pub fn is_empty(&self) -> bool {
        self.n_series == 0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Channel `channel` of series `index`.
    pub fn channel(&self, index: usize, channel: usize) -> &[f64] {
        let start = (index * self.channels + channel) * self.series_len;
        &self.data[start..start + self.series_len]
    }

    /// First channel of series `index`.
    pub fn series(&self, index: usize) -> &[f64] {
        self.channel(index, 0)
    }

    /// Iterates over the first channel of every series.
    pub fn iter_series(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.n_series).map(move |i| self.series(i))
    }

    /// The first `n` series (all channels).
    pub fn head(&self, n: usize) -> Self {
        let n = n.min(self.n_series);
        let stride = self.channels * self.series_len;
        TimeSeriesDataset {
            n_series: n,
            channels: self.channels,
            series_len: self.series_len,
            data: self.data[..n * stride].to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip() {
        let ds = TimeSeriesDataset::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(ds.n_series(), 2);
        assert_eq!(ds.series(1), &[3.0, 4.0]);
        assert_eq!(ds.head(1).as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(TimeSeriesDataset::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn payload_length_checked() {
        assert!(TimeSeriesDataset::new(2, 1, 3, vec![0.0; 5]).is_err());
    }
}
