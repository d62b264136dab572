use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::StatsError;

/// Rounding slack when comparing a log return against the level.
const LEVEL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelSign {
    /// First time the log return reaches `+theta`.
    Gain,
    /// First time the log return falls to `-theta`.
    Loss,
}

/// Distribution of first-passage times ("investment horizons").
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonDistribution {
    pub theta: f64,
    pub sign: LevelSign,
    /// Waiting time to empirical probability over uncensored starts.
    pub histogram: BTreeMap<usize, f64>,
    pub counts: BTreeMap<usize, u64>,
    /// Starts whose level is never reached before the series (or its
    /// positive-price run) ends.
    pub censored_count: u64,
    pub observed_count: u64,
}

/// Sparse table answering "max over x[i .. i + 2^k]".
struct RangeMax {
    levels: Vec<Vec<f64>>,
}

impl RangeMax {
    fn new(x: &[f64]) -> Self {
        let mut levels = vec![x.to_vec()];
        let mut width = 1;
        while 2 * width <= x.len() {
            let prev = levels.last().unwrap();
            let next: Vec<f64> = (0..=x.len() - 2 * width)
                .map(|i| prev[i].max(prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        Self { levels }
    }

    /// Smallest `j` in `from..len` with `x[j] >= target`.
    fn first_at_least(&self, from: usize, target: f64) -> Option<usize> {
        let len = self.levels[0].len();
        let mut pos = from;
        for k in (0..self.levels.len()).rev() {
            let width = 1 << k;
            if pos + width <= len && self.levels[k][pos] < target {
                pos += width;
            }
        }
        (pos < len && self.levels[0][pos] >= target).then_some(pos)
    }
}

/// First-passage times to log return `+theta` (gain) or `-theta` (loss)
/// from every start time.
pub fn inverse_statistics(
    prices: &[f64],
    theta: f64,
    sign: LevelSign,
) -> Result<HorizonDistribution, StatsError> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(StatsError::InvalidParameter(format!(
            "return level must be positive, got {theta}"
        )));
    }
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut censored = 0u64;
    let mut observed = 0u64;
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
        // Work on +-ln p so both signs become "first x[j] >= x[t] + theta".
        let s = match sign {
            LevelSign::Gain => 1.0,
            LevelSign::Loss => -1.0,
        };
        let x: Vec<f64> = prices[start..end].iter().map(|p| s * p.ln()).collect();
        let table = RangeMax::new(&x);
        for t in 0..x.len() {
            match table.first_at_least(t + 1, x[t] + theta - LEVEL_TOLERANCE) {
                Some(j) => {
                    *counts.entry(j - t).or_default() += 1;
                    observed += 1;
                }
                None => censored += 1,
            }
        }
        start = end;
    }
    let histogram = counts
        .iter()
        .map(|(&k, &c)| (k, c as f64 / observed as f64))
        .collect();
    Ok(HorizonDistribution {
        theta,
        sign,
        histogram,
        counts,
        censored_count: censored,
        observed_count: observed,
    })
}

/// Largest gap between the cumulative distributions of two discrete
/// distributions given as value-to-probability maps.
pub fn ks_statistic(a: &BTreeMap<usize, f64>, b: &BTreeMap<usize, f64>) -> f64 {
    let mut support: Vec<usize> = a.keys().chain(b.keys()).copied().collect();
    support.sort_unstable();
    support.dedup();
    let (mut ca, mut cb, mut d) = (0.0f64, 0.0f64, 0.0f64);
    for v in support {
        ca += a.get(&v).copied().unwrap_or(0.0);
        cb += b.get(&v).copied().unwrap_or(0.0);
        d = d.max((ca - cb).abs());
    }
    d
}

/// Asymptotic two-sample Kolmogorov-Smirnov critical value at level `alpha`.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}
