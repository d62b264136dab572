//! Time-series diagnostics for simulated returns.
//!
//! Every function here is pure: identical inputs give bit-identical outputs.

mod acf;
mod inverse;
mod kurtosis;
mod leadlag;
mod leverage;
mod returns;
mod volume;

pub use acf::{autocorrelation, fit_exponential_decay, AcfCurve, ExponentialDecay};
pub use inverse::{
    inverse_statistics, ks_critical_value, ks_statistic, HorizonDistribution, LevelSign,
};
pub use kurtosis::{excess_kurtosis, kurtosis_curve, KurtosisCurve};
pub use leadlag::{coarse_fine_volatility, lead_lag_asymmetry, LeadLagResult, LeadLagSampling};
pub use leverage::{leverage, LeverageCurve};
pub use returns::{log_returns, normalize, ReturnSeries};
pub use volume::{volume_volatility, VolumeVolatility};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("series is empty or too short: {0}")]
    InsufficientData(String),
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-positive correlation {value} at lag {lag}")]
    NonPositiveCorrelation { lag: usize, value: f64 },
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population variance.
pub(crate) fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

/// Pearson correlation of two equally long series.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(StatsError::InsufficientData(format!(
            "correlation needs two aligned series of length >= 2 (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Half-width of the 95% band of a Gaussian random walk for `n` points.
pub fn confidence_band(n: usize) -> f64 {
    1.96 / (n as f64).sqrt()
}
