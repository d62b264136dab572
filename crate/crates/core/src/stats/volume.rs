use super::{pearson, StatsError};

/// Window-averaged trading volume against window-averaged volatility.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeVolatility {
    pub scale: usize,
    /// `max(<Q_buy>, <Q_sell>)` per window.
    pub volume: Vec<f64>,
    /// Mean `|r|` per window.
    pub volatility: Vec<f64>,
    pub correlation: f64,
}

/// Correlation between window volume and window volatility over
/// non-overlapping windows of `dt` steps. The three series are aligned:
/// index `k` refers to step `k + 1`.
pub fn volume_volatility(
    buy_volume: &[f64],
    sell_volume: &[f64],
    returns: &[f64],
    dt: usize,
) -> Result<VolumeVolatility, StatsError> {
    if dt == 0 {
        return Err(StatsError::InvalidParameter("dt must be at least 1".into()));
    }
    if buy_volume.len() != returns.len() || sell_volume.len() != returns.len() {
        return Err(StatsError::InvalidParameter(
            "volume and return series are not aligned".into(),
        ));
    }
    let window_mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let volume: Vec<f64> = buy_volume
        .chunks_exact(dt)
        .zip(sell_volume.chunks_exact(dt))
        .map(|(b, s)| window_mean(b).max(window_mean(s)))
        .collect();
    let volatility: Vec<f64> = returns
        .chunks_exact(dt)
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>() / dt as f64)
        .collect();
    let correlation = pearson(&volume, &volatility)?;
    Ok(VolumeVolatility {
        scale: dt,
        volume,
        volatility,
        correlation,
    })
}
