use super::{mean, variance, StatsError};

/// Log returns `r(t, scale) = ln p(t) - ln p(t - scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub values: Vec<f64>,
    pub scale: usize,
}

/// Log returns at lag `dt` over every maximal run of strictly positive
/// prices. Non-positive prices split the series; returns spanning them are
/// dropped.
pub fn log_returns(prices: &[f64], dt: usize) -> Result<ReturnSeries, StatsError> {
    if dt == 0 {
        return Err(StatsError::InvalidParameter("dt must be at least 1".into()));
    }
    let mut values = Vec::with_capacity(prices.len().saturating_sub(dt));
    let mut start = 0;
    while start < prices.len() {
        if !(prices[start] > 0.0) {
            start += 1;
            continue;
        }
        let mut end = start;
        while end < prices.len() && prices[end] > 0.0 {
            end += 1;
        }
        let logs: Vec<f64> = prices[start..end].iter().map(|p| p.ln()).collect();
        values.extend(logs.iter().skip(dt).zip(&logs).map(|(b, a)| b - a));
        start = end;
    }
    if values.is_empty() {
        return Err(StatsError::InsufficientData(format!(
            "no run of {} positive prices",
            dt + 1
        )));
    }
    Ok(ReturnSeries { values, scale: dt })
}

/// Zero-mean, unit (population) variance copy of `series`.
pub fn normalize(series: &[f64]) -> Result<Vec<f64>, StatsError> {
    if series.is_empty() {
        return Err(StatsError::InsufficientData("empty series".into()));
    }
    let m = mean(series);
    let sd = variance(series).sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return Err(StatsError::ZeroVariance);
    }
    Ok(series.iter().map(|x| (x - m) / sd).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_returns() {
        assert_eq!(log_returns(&[100.0, 100.0], 1).unwrap().values, vec![0.0]);
        let r = log_returns(&[100.0, 100.0 * std::f64::consts::E], 1).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_positive_prices_split_the_series() {
        let p = [1.0, 2.0, -1.0, 4.0, 8.0, 0.0, 3.0];
        let r = log_returns(&p, 1).unwrap();
        let ln2 = 2f64.ln();
        assert_eq!(r.values.len(), 2);
        assert!((r.values[0] - ln2).abs() < 1e-15);
        assert!((r.values[1] - ln2).abs() < 1e-15);
        assert!(log_returns(&[1.0, -1.0, 1.0], 1).is_err());
        assert!(log_returns(&[1.0, 2.0], 2).is_err());
        assert!(log_returns(&[1.0, 2.0], 0).is_err());
    }

    #[test]
    fn multi_step_returns() {
        let p = [1.0, 2.0, 4.0, 8.0];
        let r = log_returns(&p, 2).unwrap();
        assert_eq!(r.scale, 2);
        assert_eq!(r.values.len(), 2);
        assert!((r.values[1] - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[1.0, -1.0, 1.0, -1.0]).unwrap(), vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(normalize(&[3.0, 3.0]), Err(StatsError::ZeroVariance));
    }

    proptest! {
        #[test]
        fn normalized_moments(x in prop::collection::vec(-1e3f64..1e3, 3..200)) {
            prop_assume!(variance(&x) > 1e-6);
            let z = normalize(&x).unwrap();
            prop_assert!(mean(&z).abs() < 1e-12);
            prop_assert!((variance(&z) - 1.0).abs() < 1e-12);
        }
    }
}
