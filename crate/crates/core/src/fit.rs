//! Exponential and power-law fits.

use crate::{Error, Result};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Largest accepted rms residual of an exponential fit, relative to the peak value.
pub const RESIDUAL_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpFit {
    pub a: f64,
    pub b: f64,
    /// rms residual divided by the largest sample.
    pub residual: f64,
}

impl ExpFit {
    pub fn eval(&self, s: f64) -> f64 {
        self.a * (-self.b * s).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub r_squared: f64,
    /// 95% half-width of the exponent.
    pub exponent_half_width: f64,
    /// 95% half-width of `ln(prefactor)`.
    pub log_prefactor_half_width: f64,
}

impl PowerLawFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.prefactor * x.powf(self.exponent)
    }
}

struct Line {
    slope: f64,
    intercept: f64,
    slope_se: f64,
    intercept_se: f64,
    r_squared: f64,
}

fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> Line {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, w)| a * w).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, w)| a * w).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for ((xi, yi), wi) in x.iter().zip(y).zip(w) {
        sxx += wi * (xi - mx).powi(2);
        sxy += wi * (xi - mx) * (yi - my);
        syy += wi * (yi - my).powi(2);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((xi, yi), wi)| wi * (yi - intercept - slope * xi).powi(2))
        .sum();
    let n = x.len() as f64;
    let sigma2 = if n > 2.0 { ss_res / (n - 2.0) } else { 0.0 };
    let slope_se = (sigma2 / sxx).sqrt();
    let intercept_se = (sigma2 * (1.0 / sw + mx * mx / sxx)).sqrt();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Line {
        slope,
        intercept,
        slope_se,
        intercept_se,
        r_squared,
    }
}

/// Least-squares fit of `a exp(-b s)`: a weighted log-linear seed refined by
/// Levenberg-Marquardt on the unweighted residuals.
pub fn fit_exponential(s: &[f64], values: &[f64]) -> Result<ExpFit> {
    if s.len() != values.len() || s.len() < 20 {
        return Err(Error::Fit(format!("need at least 20 samples, got {}", s.len())));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Fit(format!("non-positive sample {v}")));
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let weights: Vec<f64> = values.iter().map(|v| v * v).collect();
    let seed = weighted_line(s, &logs, &weights);
    let mut a = seed.intercept.exp();
    let mut b = -seed.slope;
    let cost = |a: f64, b: f64| -> f64 {
        s.iter()
            .zip(values)
            .map(|(si, yi)| (a * (-b * si).exp() - yi).powi(2))
            .sum()
    };
    let mut current = cost(a, b);
    let mut mu = 1e-3;
    for _ in 0..500 {
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for (si, yi) in s.iter().zip(values) {
            let e = (-b * si).exp();
            let r = a * e - yi;
            let j = [e, -a * si * e];
            for p in 0..2 {
                jtr[p] += j[p] * r;
                for q in 0..2 {
                    jtj[p][q] += j[p] * j[q];
                }
            }
        }
        let mut improved = false;
        while mu < 1e12 {
            let m00 = jtj[0][0] * (1.0 + mu);
            let m11 = jtj[1][1] * (1.0 + mu);
            let det = m00 * m11 - jtj[0][1] * jtj[1][0];
            let da = -(m11 * jtr[0] - jtj[0][1] * jtr[1]) / det;
            let db = -(m00 * jtr[1] - jtj[1][0] * jtr[0]) / det;
            let trial = cost(a + da, b + db);
            if trial <= current {
                let converged = da.abs() <= 1e-15 * a.abs() && db.abs() <= 1e-15 * b.abs();
                a += da;
                b += db;
                let settled = current - trial <= 1e-30 + 1e-15 * current;
                current = trial;
                mu = (mu * 0.3).max(1e-12);
                improved = !(converged || settled);
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Fit(format!("non-physical parameters a = {a}, b = {b}")));
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(*v));
    let residual = (current / s.len() as f64).sqrt() / peak;
    let span = s.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
        - s.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    if span * b < 3.0 {
        return Err(Error::Fit(format!(
            "samples span {:.2} decay lengths, need 3",
            span * b
        )));
    }
    if residual > RESIDUAL_THRESHOLD {
        return Err(Error::Fit(format!("rms residual {residual:.3} of peak")));
    }
    Ok(ExpFit { a, b, residual })
}

/// `value = C x^q` by ordinary least squares on `(ln x, ln value)`.
pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<PowerLawFit> {
    if pairs.len() < 5 {
        return Err(Error::Fit(format!("need at least 5 points, got {}", pairs.len())));
    }
    if let Some(p) = pairs.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::Fit(format!("non-positive point {p:?}")));
    }
    let x: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let line = weighted_line(&x, &y, &vec![1.0; x.len()]);
    let dof = (pairs.len() - 2) as f64;
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::Fit(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(PowerLawFit {
        prefactor: line.intercept.exp(),
        exponent: line.slope,
        r_squared: line.r_squared,
        exponent_half_width: t * line.slope_se,
        log_prefactor_half_width: t * line.intercept_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential_recovery() {
        let s: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = s.iter().map(|s| 2.0 * (-0.3 * s).exp()).collect();
        let fit = fit_exponential(&s, &y).unwrap();
        assert!((fit.a - 2.0).abs() < 1e-8);
        assert!((fit.b - 0.3).abs() < 1e-8);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn exponential_preconditions() {
        let s: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(fit_exponential(&s, &s).is_err());
        let s: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let mut y: Vec<f64> = s.iter().map(|s| (-s).exp()).collect();
        y[5] = -1.0;
        assert!(matches!(fit_exponential(&s, &y), Err(Error::Fit(_))));
        let short: Vec<f64> = (0..30).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = short.iter().map(|s| (-s).exp()).collect();
        assert!(fit_exponential(&short, &y).is_err());
    }

    #[test]
    fn exact_power_law_recovery() {
        let pairs: Vec<(f64, f64)> = [0.08, 0.09, 0.10, 0.11, 0.12]
            .iter()
            .map(|&a: &f64| (a, 0.64 * a.powf(-1.23)))
            .collect();
        let fit = fit_power_law(&pairs).unwrap();
        assert!((fit.prefactor - 0.64).abs() < 1e-10);
        assert!((fit.exponent + 1.23).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.exponent_half_width < 1e-8);
    }

    #[test]
    fn power_law_interval_covers_truth() {
        let noise = [0.01, -0.02, 0.015, -0.005, 0.0, 0.01, -0.012];
        let pairs: Vec<(f64, f64)> = noise
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let x = 0.05 + 0.02 * i as f64;
                (x, 0.5 * x.powf(0.9) * (1.0 + n))
            })
            .collect();
        let fit = fit_power_law(&pairs).unwrap();
        assert!((fit.exponent - 0.9).abs() < fit.exponent_half_width);
        assert!(fit.r_squared > 0.99);
        assert!(fit_power_law(&pairs[..4]).is_err());
    }
}
