//! Simulation and evaluation toolkit for classical noise models.
//!
//! The crate generates target datasets for band-limited thermal noise, power
//! law noise (FDWN, FGN, FBM), shot noise and impulsive noise (Bernoulli-Gaussian
//! and symmetric alpha-stable), and scores externally generated datasets
//! against a target by a geodesic distance between median multitaper spectra
//! and by recovery of each model's characteristic parameters.

// `!(x > 0.0)` style checks deliberately reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod io;
pub mod noise;
pub mod spectral;
pub mod transforms;
pub mod variates;

pub use dataset::TimeSeriesDataset;
pub use error::{Error, Result};
pub use estimators::{BgFit, HurstKind, SasFit};
pub use harness::{builtin_suite, evaluate, BenchmarkCase, BoxplotSummary, EvalReport};
pub use io::{read_csv_dataset, read_dataset, write_dataset, DatasetMeta};
pub use noise::{simulate_dataset, NoiseSpec, PulseShape, Simulator};
pub use spectral::{geodesic_distance, median_psd, MultitaperConfig, PsdEstimate};
pub use transforms::{MinMaxScaler, QuantileMap, StftArray, StftConfig};
pub use variates::{derive_stream, RngStream};
