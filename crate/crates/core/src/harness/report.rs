use std::path::Path;

use super::evaluate::{EvalReport, ParamEstimates};
use crate::error::Result;

pub fn write_report_json(report: &EvalReport, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_report_json(path: impl AsRef<Path>) -> Result<EvalReport> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn csv_err(e: csv::Error) -> crate::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => crate::Error::InvalidInput(format!("csv: {other:?}")),
    }
}

/// `freq,target,generated` rows for the two median PSDs.
pub fn write_psd_csv(report: &EvalReport, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["freq", "target", "generated"]).map_err(csv_err)?;
    let (t, g) = (&report.median_psd_target, &report.median_psd_generated);
    for k in 0..t.len() {
        w.write_record([t.freq(k).to_string(), t.values[k].to_string(), g.values[k].to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Single-PSD export: `freq,psd`.
pub fn write_single_psd_csv(psd: &crate::spectral::PsdEstimate, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["freq", "psd"]).map_err(csv_err)?;
    for k in 0..psd.len() {
        w.write_record([psd.freq(k).to_string(), psd.values[k].to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format `dataset,param,index,value` rows of the raw estimates.
pub fn write_params_csv(report: &EvalReport, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["dataset", "param", "index", "value"]).map_err(csv_err)?;
    let sets: [(&str, &ParamEstimates); 2] =
        [("target", &report.target_estimates), ("generated", &report.generated_estimates)];
    for (label, est) in sets {
        for (name, values) in &est.values {
            for (i, v) in values.iter().enumerate() {
                w.write_record([label, name, &i.to_string(), &v.to_string()]).map_err(csv_err)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::evaluate;
    use crate::noise::{simulate_dataset, NoiseSpec};
    use crate::spectral::MultitaperConfig;

    #[test]
    fn json_round_trip_and_csv_shapes() {
        let spec = NoiseSpec::bg(0.2).unwrap();
        let a = simulate_dataset(&spec, 8, 512, 1).unwrap();
        let b = simulate_dataset(&spec, 8, 512, 2).unwrap();
        let cfg = MultitaperConfig { nfft: 512, ..Default::default() };
        let report = evaluate(&a, &b, &spec, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_report_json(&report, &p).unwrap();
        let back = read_report_json(&p).unwrap();
        assert_eq!(back.geodesic_distance.to_bits(), report.geodesic_distance.to_bits());
        assert_eq!(back.target_param_summary, report.target_param_summary);
        assert_eq!(back.median_psd_target, report.median_psd_target);

        let psd = dir.path().join("psd.csv");
        write_psd_csv(&report, &psd).unwrap();
        let text = std::fs::read_to_string(&psd).unwrap();
        assert_eq!(text.lines().count(), 1 + 257);
        assert!(text.starts_with("freq,target,generated\n0,"));

        let params = dir.path().join("params.csv");
        write_params_csv(&report, &params).unwrap();
        let text = std::fs::read_to_string(&params).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 2 * 8 - report.target_failures * 2 - report.generated_failures * 2);
    }
}
