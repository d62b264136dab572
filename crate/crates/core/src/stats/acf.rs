use std::ops::RangeInclusive;

use super::{confidence_band, mean, StatsError};

#[derive(Debug, Clone, PartialEq)]
pub struct AcfCurve {
    pub lags: Vec<usize>,
    pub correlations: Vec<f64>,
    /// 95% band of an i.i.d. Gaussian series of the same length.
    pub band_halfwidth: f64,
    /// Length of the series the curve was estimated from.
    pub n: usize,
}

impl AcfCurve {
    pub fn at(&self, lag: usize) -> Option<f64> {
        self.lags
            .iter()
            .position(|&l| l == lag)
            .map(|i| self.correlations[i])
    }
}

/// Biased autocorrelation estimator for lags `0..=max_lag`.
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Result<AcfCurve, StatsError> {
    let n = series.len();
    if n <= max_lag {
        return Err(StatsError::InsufficientData(format!(
            "series of length {n} for max lag {max_lag}"
        )));
    }
    let m = mean(series);
    let centered: Vec<f64> = series.iter().map(|x| x - m).collect();
    let denom: f64 = centered.iter().map(|x| x * x).sum();
    if denom == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let correlations = (0..=max_lag)
        .map(|lag| {
            let num: f64 = centered[lag..]
                .iter()
                .zip(&centered)
                .map(|(a, b)| a * b)
                .sum();
            if lag == 0 {
                1.0
            } else {
                num / denom
            }
        })
        .collect();
    Ok(AcfCurve {
        lags: (0..=max_lag).collect(),
        correlations,
        band_halfwidth: confidence_band(n),
        n,
    })
}

/// `rho(lag) = amplitude * exp(-rate * lag)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialDecay {
    pub amplitude: f64,
    pub rate: f64,
}

/// Least-squares fit of `ln rho = ln A - rate * lag` over `lags`.
pub fn fit_exponential_decay(
    acf: &AcfCurve,
    lags: RangeInclusive<usize>,
) -> Result<ExponentialDecay, StatsError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&lag, &rho) in acf.lags.iter().zip(&acf.correlations) {
        if !lags.contains(&lag) {
            continue;
        }
        if !(rho > 0.0) {
            return Err(StatsError::NonPositiveCorrelation { lag, value: rho });
        }
        xs.push(lag as f64);
        ys.push(rho.ln());
    }
    if xs.len() < 2 {
        return Err(StatsError::InsufficientData(format!(
            "{} lags in fit range",
            xs.len()
        )));
    }
    let mx = mean(&xs);
    let my = mean(&ys);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(ExponentialDecay {
        amplitude: (my - slope * mx).exp(),
        rate: -slope,
    })
}
