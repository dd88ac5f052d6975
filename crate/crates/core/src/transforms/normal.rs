#![allow(clippy::excessive_precision)]

use std::f64::consts::SQRT_2;

use statrs::function::erf::erfc;

use crate::error::{invalid_param, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Inverse standard normal CDF (Wichura's AS241, PPND16), accurate to about
/// 1e-16 relative.
pub fn normal_inverse_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid_param(format!("probability must lie in (0, 1), got {p}")));
    }
    Ok(ppnd16(p))
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

const A: [f64; 8] = [
    3.38713287279636660800,
    1.33141667891784377450e2,
    1.97159095030655144270e3,
    1.37316937655094611250e4,
    4.59219539315498714570e4,
    6.72657709270087008530e4,
    3.34305755835881281050e4,
    2.50908092873012267270e3,
];
const B: [f64; 8] = [
    1.0,
    4.23133307016009112520e1,
    6.87187007492057908300e2,
    5.39419602142475110770e3,
    2.12137943015865958670e4,
    3.93078958000927106100e4,
    2.87290857357219426740e4,
    5.22649527885285456100e3,
];
const C: [f64; 8] = [
    1.42343711074968357734,
    4.63033784615654529590,
    5.76949722146069140550,
    3.64784832476320460504,
    1.27045825245236838258,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
];
const D: [f64; 8] = [
    1.0,
    2.05319162663775882187,
    1.67638483018380384940,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
];
const E: [f64; 8] = [
    6.65790464350110377720,
    5.46378491116411436990,
    1.78482653991729133580,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
];
const F: [f64; 8] = [
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
];

fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        assert_eq!(normal_inverse_cdf(0.5).unwrap(), 0.0);
        assert!((normal_inverse_cdf(0.975).unwrap() - 1.959_964).abs() < 1e-5);
        assert!((normal_inverse_cdf(0.025).unwrap() + 1.959_964).abs() < 1e-5);
        assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-11, "{}", normal_cdf(1.959_963_984_540_054) - 0.975);
    }

    #[test]
    fn round_trips_through_the_cdf() {
        for p in [1e-300, 1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-6, 1.0 - 1e-12] {
            let x = normal_inverse_cdf(p).unwrap();
            let tail = p.min(1.0 - p);
            assert!((normal_cdf(x) - p).abs() <= 1e-10 * tail + 1e-15, "p={p} err={}", normal_cdf(x) - p);
        }
        for p in [1e-6, 0.3, 1.0 - 1e-6] {
            let x = normal_inverse_cdf(p).unwrap();
            assert!((normal_cdf(x) - p).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(normal_inverse_cdf(p).is_err());
        }
    }
}
