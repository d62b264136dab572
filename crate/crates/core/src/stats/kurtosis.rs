use super::{mean, StatsError};

/// Fewest aggregated returns for which a scale is reported.
pub const MIN_AGGREGATED: usize = 20;

/// Excess kurtosis (fourth central moment over squared variance, minus 3).
/// `None` for series with zero variance or fewer than two points.
pub fn excess_kurtosis(x: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let m = mean(x);
    let (mut m2, mut m4) = (0.0, 0.0);
    for v in x {
        let d = (v - m) * (v - m);
        m2 += d;
        m4 += d * d;
    }
    let n = x.len() as f64;
    m2 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return None;
    }
    Some(m4 / (m2 * m2) - 3.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KurtosisCurve {
    pub scales: Vec<usize>,
    pub kurtoses: Vec<f64>,
    /// Aggregated returns behind each reported kurtosis.
    pub sample_sizes: Vec<usize>,
    /// Requested scales left out (zero variance or too few windows).
    pub omitted: Vec<usize>,
}

impl KurtosisCurve {
    pub fn at(&self, scale: usize) -> Option<f64> {
        self.scales
            .iter()
            .position(|&s| s == scale)
            .map(|i| self.kurtoses[i])
    }
}

/// Excess kurtosis of non-overlapping `dt`-step sums of unit returns, for
/// every `dt` in `scales`.
pub fn kurtosis_curve(returns: &[f64], scales: &[usize]) -> Result<KurtosisCurve, StatsError> {
    if scales.contains(&0) {
        return Err(StatsError::InvalidParameter("scale 0".into()));
    }
    let mut curve = KurtosisCurve {
        scales: Vec::new(),
        kurtoses: Vec::new(),
        sample_sizes: Vec::new(),
        omitted: Vec::new(),
    };
    for &dt in scales {
        let agg: Vec<f64> = returns.chunks_exact(dt).map(|c| c.iter().sum()).collect();
        match excess_kurtosis(&agg) {
            Some(k) if agg.len() >= MIN_AGGREGATED => {
                curve.scales.push(dt);
                curve.kurtoses.push(k);
                curve.sample_sizes.push(agg.len());
            }
            _ => curve.omitted.push(dt),
        }
    }
    if curve.scales.is_empty() {
        return Err(StatsError::InsufficientData(
            "no scale has enough aggregated returns".into(),
        ));
    }
    Ok(curve)
}
