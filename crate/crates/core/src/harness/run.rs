use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::evaluate::{evaluate, EvalReport, Seeds};
use super::report::{write_params_csv, write_psd_csv, write_report_json};
use super::suite::BenchmarkCase;
use crate::error::{invalid_param, Result};
use crate::io::{sidecar_path, write_meta, DatasetMeta, DatasetWriter};
use crate::noise::{simulate_with, Simulator};
use crate::spectral::MultitaperConfig;
use crate::variates::derive_stream;

/// Series generated per block when streaming a training set to disk.
const BLOCK: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRunConfig {
    pub outdir: PathBuf,
    /// Fraction of the default dataset sizes to generate, in `(0, 1]`.
    pub scale: f64,
    pub master_seed: u64,
    pub multitaper: MultitaperConfig,
}

/// `ceil(size * scale)`, at least 1.
pub fn scaled_size(size: usize, scale: f64) -> usize {
    ((size as f64 * scale).ceil() as usize).max(1)
}

/// Seed of case `index` under `master_seed`.
pub fn case_seed(master_seed: u64, index: usize) -> u64 {
    derive_stream(master_seed, index as u64).next_u64()
}

/// Summary line per case, written to `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub case_id: String,
    pub model: String,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    pub geodesic_distance: f64,
    pub target_failures: usize,
    pub reference_failures: usize,
}

fn meta_for(case: &BenchmarkCase, seed: u64, role: &str, first: usize, n: usize) -> DatasetMeta {
    let mut meta = DatasetMeta::new(format!("noisebench {}", env!("CARGO_PKG_VERSION")));
    meta.spec = Some(case.spec);
    meta.master_seed = Some(seed);
    meta.params.insert("case_id".into(), case.case_id.clone().into());
    meta.params.insert("role".into(), role.into());
    meta.params.insert("first_stream".into(), first.into());
    meta.params.insert("n_series".into(), n.into());
    meta.params.insert("series_len".into(), case.series_len.into());
    meta
}

/// Generates one case into `dir`: the training set, the target test set and
/// the report of the test set against an independent target set (the
/// sampling-noise floor). All three draw disjoint stream ranges of one seed.
pub fn run_case(case: &BenchmarkCase, seed: u64, scale: f64, cfg: &MultitaperConfig, dir: &Path) -> Result<EvalReport> {
    fs::create_dir_all(dir)?;
    let sim = Simulator::new(&case.spec, case.series_len)?;
    let n_train = scaled_size(case.train_size, scale);
    let n_test = scaled_size(case.test_size, scale);

    let train_path = dir.join("target_train.nbts");
    let mut writer = DatasetWriter::create(&train_path, 1, n_train, case.series_len)?;
    for start in (0..n_train).step_by(BLOCK) {
        writer.append(&simulate_with(&sim, start..(start + BLOCK).min(n_train), seed)?)?;
    }
    writer.finish()?;
    write_meta(&meta_for(case, seed, "train", 0, n_train), sidecar_path(&train_path))?;

    let test = simulate_with(&sim, n_train..n_train + n_test, seed)?;
    let test_path = dir.join("target_test.nbts");
    crate::io::write_dataset(&test, &test_path)?;
    write_meta(&meta_for(case, seed, "test", n_train, n_test), sidecar_path(&test_path))?;

    let reference = simulate_with(&sim, n_train + n_test..n_train + 2 * n_test, seed)?;
    let mut report = evaluate(&test, &reference, &case.spec, cfg)?;
    report.case_id = case.case_id.clone();
    report.seeds = Seeds { target: Some(seed), generated: Some(seed) };
    write_report_json(&report, dir.join("report.json"))?;
    write_psd_csv(&report, dir.join("psd.csv"))?;
    write_params_csv(&report, dir.join("params.csv"))?;
    Ok(report)
}

/// Runs `cases` in order, one subdirectory per case, and writes `suite.json`
/// (the case list) and `summary.csv`.
pub fn run_suite(cases: &[BenchmarkCase], cfg: &SuiteRunConfig) -> Result<Vec<CaseOutcome>> {
    if !(cfg.scale > 0.0 && cfg.scale <= 1.0) {
        return Err(invalid_param(format!("scale must lie in (0, 1], got {}", cfg.scale)));
    }
    fs::create_dir_all(&cfg.outdir)?;
    let mut listing = serde_json::to_string_pretty(cases)?;
    listing.push('\n');
    fs::write(cfg.outdir.join("suite.json"), listing)?;

    let mut outcomes = Vec::with_capacity(cases.len());
    for (i, case) in cases.iter().enumerate() {
        let seed = case_seed(cfg.master_seed, i);
        let report = run_case(case, seed, cfg.scale, &cfg.multitaper, &cfg.outdir.join(&case.case_id))?;
        outcomes.push(CaseOutcome {
            case_id: case.case_id.clone(),
            model: case.spec.model_name().to_string(),
            seed,
            train_size: scaled_size(case.train_size, cfg.scale),
            test_size: scaled_size(case.test_size, cfg.scale),
            geodesic_distance: report.geodesic_distance,
            target_failures: report.target_failures,
            reference_failures: report.generated_failures,
        });
    }
    let mut w = csv::Writer::from_path(cfg.outdir.join("summary.csv")).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => crate::Error::Io(io),
        other => crate::Error::InvalidInput(format!("csv: {other:?}")),
    })?;
    for o in &outcomes {
        w.serialize(o).map_err(|e| crate::Error::InvalidInput(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::read_dataset;
    use crate::noise::NoiseSpec;

    #[test]
    fn scaled_sizes() {
        assert_eq!(scaled_size(4096, 0.05), 205);
        assert_eq!(scaled_size(16384, 0.05), 820);
        assert_eq!(scaled_size(4096, 1.0), 4096);
        assert_eq!(scaled_size(10, 1e-6), 1);
    }

    #[test]
    fn case_directory_layout_and_disjoint_streams() {
        let mut case = BenchmarkCase::new("fgn_test", NoiseSpec::fgn(0.7).unwrap());
        case.series_len = 512;
        case.train_size = 1100;
        case.test_size = 40;
        let dir = tempfile::tempdir().unwrap();
        let cfg = MultitaperConfig { nfft: 512, ..Default::default() };
        let report = run_case(&case, 9, 1.0, &cfg, dir.path()).unwrap();
        assert_eq!(report.case_id, "fgn_test");
        for f in ["target_train.nbts", "target_train.json", "target_test.nbts", "target_test.json", "report.json", "psd.csv", "params.csv"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let train = read_dataset(dir.path().join("target_train.nbts")).unwrap();
        let test = read_dataset(dir.path().join("target_test.nbts")).unwrap();
        assert_eq!((train.n_series(), test.n_series()), (1100, 40));
        // Block-wise generation equals one-shot generation.
        let sim = Simulator::new(&case.spec, 512).unwrap();
        assert_eq!(train, simulate_with(&sim, 0..1100, 9).unwrap());
        assert_eq!(test, simulate_with(&sim, 1100..1140, 9).unwrap());
        assert!(report.geodesic_distance > 0.0);
    }

    #[test]
    fn rejects_bad_scale() {
        let cfg = SuiteRunConfig {
            outdir: tempfile::tempdir().unwrap().path().to_path_buf(),
            scale: 0.0,
            master_seed: 1,
            multitaper: MultitaperConfig::default(),
        };
        assert!(run_suite(&[], &cfg).is_err());
    }
}
