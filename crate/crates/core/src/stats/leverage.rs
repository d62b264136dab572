use super::StatsError;

#[derive(Debug, Clone, PartialEq)]
pub struct LeverageCurve {
    /// `-max_lag..=max_lag`.
    pub lags: Vec<i64>,
    pub values: Vec<f64>,
}

impl LeverageCurve {
    pub fn at(&self, lag: i64) -> Option<f64> {
        self.lags
            .iter()
            .position(|&l| l == lag)
            .map(|i| self.values[i])
    }
}

/// `L(lag) = <r(t + lag)^2 r(t)> / <r(t)^2>^2`, raw moments, no demeaning.
pub fn leverage(returns: &[f64], max_lag: usize) -> Result<LeverageCurve, StatsError> {
    let n = returns.len();
    if n <= max_lag {
        return Err(StatsError::InsufficientData(format!(
            "{n} returns for max lag {max_lag}"
        )));
    }
    let second = returns.iter().map(|r| r * r).sum::<f64>() / n as f64;
    if second == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let denom = second * second;
    let max = max_lag as i64;
    let mut lags = Vec::with_capacity(2 * max_lag + 1);
    let mut values = Vec::with_capacity(2 * max_lag + 1);
    for lag in -max..=max {
        let shift = lag.unsigned_abs() as usize;
        let m = n - shift;
        let (later, earlier) = if lag >= 0 {
            (&returns[shift..], &returns[..m])
        } else {
            (&returns[..m], &returns[shift..])
        };
        let num: f64 = later
            .iter()
            .zip(earlier)
            .map(|(a, b)| a * a * b)
            .sum::<f64>()
            / m as f64;
        lags.push(lag);
        values.push(num / denom);
    }
    Ok(LeverageCurve { lags, values })
}
