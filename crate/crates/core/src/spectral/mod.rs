//! Multitaper PSD estimation, dataset-median aggregation and the geodesic
//! distance between spectra.

mod distance;
mod dpss;
mod multitaper;

pub use distance::{geodesic_distance, loglog_slope};
pub use dpss::{dpss, DpssSet};
pub use multitaper::{median_of, median_psd, multitaper_psd, Multitaper, MultitaperConfig, PsdEstimate};
