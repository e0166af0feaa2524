//! Ordinary least squares on raw or log-log data.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `y = intercept + slope·x`.
    Linear,
    /// `y = e^{intercept} x^{slope}`, fitted as a line in `(ln x, ln y)`.
    PowerLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    /// Slope, or exponent for a power law.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard errors; absent with fewer than three points.
    pub slope_stderr: Option<f64>,
    pub intercept_stderr: Option<f64>,
    pub points: usize,
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        match self.model {
            FitModel::Linear => self.intercept + self.slope * x,
            FitModel::PowerLaw => self.intercept.exp() * x.powf(self.slope),
        }
    }
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(invalid(format!(
            "fit needs paired data, got {} x and {} y",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(invalid("fit needs at least two points"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(invalid("fit data must be finite"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("fit needs at least two distinct x values"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    let (slope_stderr, intercept_stderr) = if x.len() > 2 {
        let s2 = sse / (n - 2.0);
        (
            Some((s2 / sxx).sqrt()),
            Some((s2 * (1.0 / n + mx * mx / sxx)).sqrt()),
        )
    } else {
        (None, None)
    };
    Ok(FitResult {
        model: FitModel::Linear,
        slope,
        intercept,
        r_squared,
        slope_stderr,
        intercept_stderr,
        points: x.len(),
    })
}

pub fn power_law_fit(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(invalid("power-law fit needs strictly positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    Ok(FitResult {
        model: FitModel::PowerLaw,
        ..linear_fit(&lx, &ly)?
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let f = linear_fit(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!((f.intercept - 1.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
        assert!(f.slope_stderr.unwrap() < 1e-14);
        assert_eq!(f.predict(10.0), 21.0);
    }

    #[test]
    fn standard_errors_match_textbook_values() {
        // y = 1 + x with residuals (+1, -1, -1, +1): SSE = 4, Sxx = 5
        let f = linear_fit(&[0.0, 1.0, 2.0, 3.0], &[2.0, 1.0, 2.0, 5.0]).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-14);
        assert!((f.intercept - 1.0).abs() < 1e-14);
        let s2 = 4.0 / 2.0;
        assert!((f.slope_stderr.unwrap() - (s2 / 5.0_f64).sqrt()).abs() < 1e-14);
        assert!(
            (f.intercept_stderr.unwrap() - (s2 * (0.25 + 2.25 / 5.0_f64)).sqrt()).abs() < 1e-14
        );
        assert!((f.r_squared - (1.0 - 4.0 / 9.0)).abs() < 1e-14);
    }

    #[test]
    fn power_law_recovers_exponent() {
        let x = [50.0, 100.0, 200.0, 400.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-2.0)).collect();
        let f = power_law_fit(&x, &y).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.predict(80.0) - 3.0 / 6400.0).abs() < 1e-15);
        assert!(power_law_fit(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(linear_fit(&[1.0, 2.0], &[1.0]).is_err());
        assert_eq!(
            linear_fit(&[1.0, 2.0], &[1.0, 2.0]).unwrap().slope_stderr,
            None
        );
    }
}
