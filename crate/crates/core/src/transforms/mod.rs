//! Preprocessing transforms: min-max scaling, the quantile-to-normal map and
//! the STFT with its overlap-add inverse.

mod minmax;
mod normal;
mod quantile;
mod stft;

pub use minmax::MinMaxScaler;
pub use normal::{normal_cdf, normal_inverse_cdf};
pub use quantile::{QuantileMap, DEFAULT_N_QUANTILES};
pub use stft::{istft, stft, Stft, StftArray, StftConfig};
