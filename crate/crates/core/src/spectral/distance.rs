use super::multitaper::PsdEstimate;
use crate::error::{invalid_input, Result};

fn check_grids(a: &PsdEstimate, b: &PsdEstimate) -> Result<()> {
    if a.values.len() != b.values.len() || (a.df - b.df).abs() > 1e-15 * a.df.abs().max(b.df.abs()) {
        return Err(invalid_input(format!(
            "PSD grids differ: {} bins at df={} vs {} bins at df={}",
            a.values.len(),
            a.df,
            b.values.len(),
            b.df
        )));
    }
    if a.values.is_empty() {
        return Err(invalid_input("PSD grids are empty"));
    }
    Ok(())
}

/// Geodesic distance between two PSDs on the same grid: the standard
/// deviation over bins of `ln(generated / target)`, with every bin weighted
/// equally. Invariant to rescaling either PSD by a positive constant.
pub fn geodesic_distance(generated: &PsdEstimate, target: &PsdEstimate) -> Result<f64> {
    check_grids(generated, target)?;
    generated.check_positive()?;
    target.check_positive()?;
    let ratios: Vec<f64> = generated
        .values
        .iter()
        .zip(&target.values)
        .map(|(g, t)| (g / t).ln())
        .collect();
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
    Ok(var.sqrt())
}

/// Least-squares slope of `ln P` against `ln f` over `f_min <= f <= f_max`,
/// excluding the DC bin.
pub fn loglog_slope(psd: &PsdEstimate, f_min: f64, f_max: f64) -> Result<f64> {
    if !(f_min > 0.0 && f_min < f_max && f_max <= 0.5) {
        return Err(invalid_input(format!("invalid slope band [{f_min}, {f_max}]")));
    }
    let points: Vec<(f64, f64)> = (1..psd.values.len())
        .map(|k| (psd.freq(k), psd.values[k]))
        .filter(|&(f, _)| f >= f_min && f <= f_max)
        .map(|(f, p)| (f.ln(), p.ln()))
        .collect();
    if points.len() < 8 {
        return Err(invalid_input(format!(
            "only {} bins in [{f_min}, {f_max}], need at least 8",
            points.len()
        )));
    }
    if points.iter().any(|(_, y)| !y.is_finite()) {
        return Err(invalid_input("nonpositive PSD value in slope band"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
