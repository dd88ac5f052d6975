use crate::error::{invalid_param, Error, Result};
use crate::noise::{pulse_integrals, PulseShape};

/// Event-rate estimate for shot noise from the sample mean and variance,
/// `nu = 2 mu^2 I2 / (sigma^2 I1^2)`, where `I1` and `I2` are the integrals of
/// the pulse and of its square.
pub fn shot_event_rate(x: &[f64], pulse: PulseShape, sigma_d: f64) -> Result<f64> {
    if !(sigma_d > 0.0) {
        return Err(invalid_param(format!("pulse duration must be positive, got {sigma_d}")));
    }
    if x.len() < 2 {
        return Err(Error::DegenerateInput("need at least two samples".into()));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    if !(var > 0.0) {
        return Err(Error::DegenerateInput("zero sample variance".into()));
    }
    let (i1, i2) = pulse_integrals(pulse, sigma_d);
    Ok(2.0 * mean * mean * i2 / (var * i1 * i1))
}
