use super::{confidence_band, pearson, StatsError};

/// Sampling of coarse and fine volatilities: `n` sub-returns of `dt` steps
/// per sample, samples every `stride` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LeadLagSampling {
    pub dt: usize,
    pub n: usize,
    pub stride: usize,
}

impl Default for LeadLagSampling {
    fn default() -> Self {
        Self {
            dt: 10,
            n: 5,
            stride: 50,
        }
    }
}

/// Coarse volatility `|sum of n dt-returns|` and fine volatility
/// `mean of |dt-returns|`, one pair per sample.
pub fn coarse_fine_volatility(
    returns: &[f64],
    sampling: LeadLagSampling,
) -> Result<(Vec<f64>, Vec<f64>), StatsError> {
    let LeadLagSampling { dt, n, stride } = sampling;
    if dt == 0 || n == 0 {
        return Err(StatsError::InvalidParameter("dt and n must be positive".into()));
    }
    let span = n * dt;
    if stride < span {
        return Err(StatsError::InvalidParameter(format!(
            "stride {stride} shorter than sampled span {span}"
        )));
    }
    if returns.len() < span {
        return Err(StatsError::InsufficientData(format!(
            "{} returns for a span of {span}",
            returns.len()
        )));
    }
    let samples = (returns.len() - span) / stride + 1;
    let mut coarse = Vec::with_capacity(samples);
    let mut fine = Vec::with_capacity(samples);
    for i in 0..samples {
        let start = i * stride;
        let (mut sum, mut abs_sum) = (0.0, 0.0);
        for block in returns[start..start + span].chunks_exact(dt) {
            let r: f64 = block.iter().sum();
            sum += r;
            abs_sum += r.abs();
        }
        coarse.push(sum.abs());
        fine.push(abs_sum / n as f64);
    }
    Ok((coarse, fine))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeadLagResult {
    /// `-max_lag..=max_lag`.
    pub lags: Vec<i64>,
    /// `Corr(v_c(t + lag), v_f(t))`.
    pub rho_cf: Vec<f64>,
    /// `rho_cf(lag) - rho_cf(-lag)` for `lag = 1..=max_lag`.
    pub asymmetry: Vec<f64>,
    pub band_halfwidth: f64,
    pub n_samples: usize,
    pub sampling: Option<LeadLagSampling>,
}

impl LeadLagResult {
    pub fn rho_at(&self, lag: i64) -> Option<f64> {
        self.lags
            .iter()
            .position(|&l| l == lag)
            .map(|i| self.rho_cf[i])
    }
}

/// Lead-lag correlation between coarse and fine volatility.
pub fn lead_lag_asymmetry(
    coarse: &[f64],
    fine: &[f64],
    max_lag: usize,
) -> Result<LeadLagResult, StatsError> {
    let len = coarse.len();
    if fine.len() != len {
        return Err(StatsError::InvalidParameter("series not aligned".into()));
    }
    if len <= max_lag + 1 {
        return Err(StatsError::InsufficientData(format!(
            "{len} samples for max lag {max_lag}"
        )));
    }
    let max = max_lag as i64;
    let mut lags = Vec::with_capacity(2 * max_lag + 1);
    let mut rho_cf = Vec::with_capacity(2 * max_lag + 1);
    for lag in -max..=max {
        let shift = lag.unsigned_abs() as usize;
        let m = len - shift;
        let (c, f) = if lag >= 0 {
            (&coarse[shift..], &fine[..m])
        } else {
            (&coarse[..m], &fine[shift..])
        };
        lags.push(lag);
        rho_cf.push(pearson(c, f)?);
    }
    let centre = max_lag;
    let asymmetry = (1..=max_lag)
        .map(|k| rho_cf[centre + k] - rho_cf[centre - k])
        .collect();
    Ok(LeadLagResult {
        lags,
        rho_cf,
        asymmetry,
        band_halfwidth: confidence_band(len),
        n_samples: len,
        sampling: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sampling(dt: usize, n: usize, stride: usize) -> LeadLagSampling {
        LeadLagSampling { dt, n, stride }
    }

    #[test]
    fn single_block_coarse_equals_fine() {
        let r: Vec<f64> = (0..40).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let (c, f) = coarse_fine_volatility(&r, sampling(3, 1, 3)).unwrap();
        assert_eq!(c, f);
    }

    #[test]
    fn alternating_returns() {
        let r = [1.0, -1.0, 1.0, -1.0, 1.0];
        let (c, f) = coarse_fine_volatility(&r, sampling(1, 5, 5)).unwrap();
        assert_eq!((c, f), (vec![1.0], vec![1.0]));
    }

    #[test]
    fn rejects_overlapping_sampling() {
        assert!(coarse_fine_volatility(&[0.0; 100], sampling(10, 5, 40)).is_err());
        assert!(coarse_fine_volatility(&[0.0; 10], sampling(10, 5, 50)).is_err());
    }

    #[test]
    fn paper_sampling_sample_count() {
        let r = vec![0.01; 50_000];
        let (c, _) = coarse_fine_volatility(&r, LeadLagSampling::default()).unwrap();
        assert_eq!(c.len(), 1000);
    }

    #[test]
    fn identical_series_have_no_asymmetry() {
        let x: Vec<f64> = (0..200).map(|i| ((i * 37) % 23) as f64).collect();
        let ll = lead_lag_asymmetry(&x, &x, 5).unwrap();
        assert!(ll.asymmetry.iter().all(|&a| a == 0.0));
        assert!((ll.rho_at(0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(ll.lags.len(), 11);
    }

    #[test]
    fn detects_coarse_leading_fine() {
        // fine(t) follows coarse(t - 1): correlation peaks at lag -1.
        let c: Vec<f64> = (0..300).map(|i| ((i * 31) % 17) as f64).collect();
        let mut f = vec![0.0];
        f.extend_from_slice(&c[..299]);
        let ll = lead_lag_asymmetry(&c, &f, 3).unwrap();
        assert!(ll.rho_at(-1).unwrap() > 0.99);
        assert!(ll.asymmetry[0] < -0.5);
    }

    proptest! {
        #[test]
        fn coarse_bounded_by_fine(r in prop::collection::vec(-1f64..1.0, 50..200), n in 1usize..6, dt in 1usize..4) {
            let (c, f) = coarse_fine_volatility(&r, sampling(dt, n, n * dt)).unwrap();
            for (a, b) in c.iter().zip(&f) {
                prop_assert!(*a <= n as f64 * b + 1e-12);
            }
        }

        #[test]
        fn time_reversal_negates_asymmetry(
            data in prop::collection::vec((0f64..1.0, 0f64..1.0), 30..120)
        ) {
            let c: Vec<f64> = data.iter().map(|d| d.0).collect();
            let f: Vec<f64> = data.iter().map(|d| d.1).collect();
            let rc: Vec<f64> = c.iter().rev().copied().collect();
            let rf: Vec<f64> = f.iter().rev().copied().collect();
            let a = lead_lag_asymmetry(&c, &f, 4).unwrap();
            let b = lead_lag_asymmetry(&rc, &rf, 4).unwrap();
            for (x, y) in a.asymmetry.iter().zip(&b.asymmetry) {
                prop_assert!((x + y).abs() < 1e-9);
            }
        }
    }
}
