use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::{ExponentialFit, FitError, PowerLawFit};

/// Two-sided significance level for declaring a winner.
pub const VUONG_SIGNIFICANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Favored {
    /// The first model (the power law in [`vuong_test`]).
    First,
    /// The second model (the exponential in [`vuong_test`]).
    Second,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VuongResult {
    /// Normalized log-likelihood ratio `sum(d) / sqrt(n var(d))`.
    pub lr: f64,
    /// Two-sided p-value under the standard normal.
    pub p_value: f64,
    pub favored: Favored,
    /// The pointwise differences had zero variance.
    pub degenerate: bool,
}

/// Vuong's test on pointwise log-likelihoods of two models.
pub fn vuong_compare(first: &[f64], second: &[f64]) -> Result<VuongResult, FitError> {
    if first.len() != second.len() || first.is_empty() {
        return Err(FitError::InvalidInput("log-likelihood arrays not aligned".into()));
    }
    let d: Vec<f64> = first.iter().zip(second).map(|(a, b)| a - b).collect();
    let n = d.len() as f64;
    let sum: f64 = d.iter().sum();
    let mean = sum / n;
    let var = d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if !(var > 0.0) {
        return Ok(VuongResult {
            lr: 0.0,
            p_value: 1.0,
            favored: Favored::Inconclusive,
            degenerate: true,
        });
    }
    let lr = sum / (n * var).sqrt();
    let p_value = erfc(lr.abs() / std::f64::consts::SQRT_2);
    let favored = if p_value < VUONG_SIGNIFICANCE {
        if lr > 0.0 {
            Favored::First
        } else {
            Favored::Second
        }
    } else {
        Favored::Inconclusive
    };
    Ok(VuongResult {
        lr,
        p_value,
        favored,
        degenerate: false,
    })
}

/// Power law (first) against exponential (second) on the common tail
/// `x >= x_min`. `Favored::First` means the power law wins.
pub fn vuong_test(
    samples: &[f64],
    power_law: &PowerLawFit,
    exponential: &ExponentialFit,
) -> Result<VuongResult, FitError> {
    if power_law.x_min != exponential.x_min {
        return Err(FitError::InvalidInput("fits use different cutoffs".into()));
    }
    let tail: Vec<f64> = samples.iter().copied().filter(|&x| x >= power_law.x_min).collect();
    let pl: Vec<f64> = tail.iter().map(|&x| power_law.log_pdf(x)).collect();
    let ex: Vec<f64> = tail.iter().map(|&x| exponential.log_pdf(x)).collect();
    vuong_compare(&pl, &ex)
}
