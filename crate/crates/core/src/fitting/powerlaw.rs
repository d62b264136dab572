use super::FitError;

/// Continuous power law `p(x) = (alpha - 1) / x_min * (x / x_min)^-alpha`
/// for `x >= x_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub x_min: f64,
    pub n_tail: usize,
    /// Kolmogorov-Smirnov distance between the tail and the fitted law.
    pub ks_distance: f64,
}

impl PowerLawFit {
    pub fn log_pdf(&self, x: f64) -> f64 {
        (self.alpha - 1.0).ln() - self.x_min.ln() - self.alpha * (x / self.x_min).ln()
    }

    /// `P(X >= x)` for `x >= x_min`.
    pub fn ccdf(&self, x: f64) -> f64 {
        (x / self.x_min).powf(1.0 - self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawOptions {
    /// Minimum number of samples required overall.
    pub min_samples: usize,
    /// Smallest tail considered for a cutoff.
    pub min_tail: usize,
    /// When the sample has more distinct values than this, the cutoff scan
    /// first visits this many candidates evenly spread by rank, then scans
    /// every distinct value between the neighbours of the best one.
    /// `None` scans every distinct value.
    pub max_candidates: Option<usize>,
}

impl Default for PowerLawOptions {
    fn default() -> Self {
        Self {
            min_samples: 50,
            min_tail: 2,
            max_candidates: Some(2000),
        }
    }
}

/// Power-law tail fit with the lower cutoff chosen by minimum KS distance.
pub fn fit_powerlaw_tail(samples: &[f64]) -> Result<PowerLawFit, FitError> {
    fit_powerlaw_tail_with(samples, PowerLawOptions::default())
}

struct Sorted {
    x: Vec<f64>,
    ln_x: Vec<f64>,
    /// `suffix_ln[i] = sum of ln_x[i..]`.
    suffix_ln: Vec<f64>,
}

impl Sorted {
    /// Alpha and KS distance for the tail starting at sorted index `m`.
    /// Gives up (returns `None`) once the running distance exceeds `bound`.
    fn evaluate(&self, m: usize, bound: f64) -> Option<(f64, f64)> {
        let k = self.x.len() - m;
        let ln_min = self.ln_x[m];
        let denom = self.suffix_ln[m] - k as f64 * ln_min;
        if !(denom > 0.0) {
            return None;
        }
        let alpha = 1.0 + k as f64 / denom;
        let kf = k as f64;
        let mut d: f64 = 0.0;
        for i in 0..k {
            let fit = 1.0 - ((1.0 - alpha) * (self.ln_x[m + i] - ln_min)).exp();
            let before = i as f64 / kf;
            let after = (i + 1) as f64 / kf;
            d = d.max((fit - before).abs()).max((after - fit).abs());
            if d > bound {
                return None;
            }
        }
        Some((alpha, d))
    }
}

pub fn fit_powerlaw_tail_with(
    samples: &[f64],
    options: PowerLawOptions,
) -> Result<PowerLawFit, FitError> {
    if samples.len() < options.min_samples {
        return Err(FitError::TooFewSamples {
            needed: options.min_samples,
            got: samples.len(),
        });
    }
    if samples.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(FitError::InvalidInput("samples must be positive and finite".into()));
    }
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let ln_x: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let mut suffix_ln = vec![0.0; x.len() + 1];
    for i in (0..x.len()).rev() {
        suffix_ln[i] = suffix_ln[i + 1] + ln_x[i];
    }
    let sorted = Sorted { x, ln_x, suffix_ln };
    let n = sorted.x.len();

    // Start index of each distinct value with a usable tail.
    let starts: Vec<usize> = (0..n)
        .filter(|&i| i == 0 || sorted.x[i] != sorted.x[i - 1])
        .filter(|&i| n - i >= options.min_tail.max(2) && sorted.x[i] < sorted.x[n - 1])
        .collect();
    if starts.is_empty() {
        return Err(FitError::Degenerate("no cutoff leaves a non-constant tail".into()));
    }

    let mut best: Option<(usize, f64, f64)> = None;
    let visit = |m: usize, best: &mut Option<(usize, f64, f64)>| {
        let bound = best.map_or(f64::INFINITY, |b| b.2);
        if let Some((alpha, d)) = sorted.evaluate(m, bound) {
            // Ties keep the smaller cutoff (larger tail).
            let better = match *best {
                None => true,
                Some((bm, _, bd)) => d < bd || (d == bd && m < bm),
            };
            if better {
                *best = Some((m, alpha, d));
            }
        }
    };

    match options.max_candidates {
        Some(cap) if cap >= 2 && starts.len() > cap => {
            let stride = (starts.len() - 1) as f64 / (cap - 1) as f64;
            let coarse: Vec<usize> = (0..cap).map(|c| (c as f64 * stride).round() as usize).collect();
            for &c in &coarse {
                visit(starts[c], &mut best);
            }
            let chosen = best.map(|b| b.0).expect("coarse scan found no cutoff");
            let pos = coarse
                .iter()
                .position(|&c| starts[c] == chosen)
                .expect("best cutoff comes from the coarse grid");
            let lo = if pos == 0 { 0 } else { coarse[pos - 1] };
            let hi = if pos + 1 == coarse.len() { starts.len() - 1 } else { coarse[pos + 1] };
            for &m in &starts[lo..=hi] {
                visit(m, &mut best);
            }
        }
        _ => {
            for &m in &starts {
                visit(m, &mut best);
            }
        }
    }

    let (m, alpha, ks_distance) =
        best.ok_or_else(|| FitError::Degenerate("no admissible cutoff".into()))?;
    Ok(PowerLawFit {
        alpha,
        x_min: sorted.x[m],
        n_tail: n - m,
        ks_distance,
    })
}

/// Shifted exponential `p(x) = rate * exp(-rate (x - x_min))` for `x >= x_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub rate: f64,
    pub x_min: f64,
    pub n_tail: usize,
    pub log_likelihood: f64,
}

impl ExponentialFit {
    pub fn log_pdf(&self, x: f64) -> f64 {
        self.rate.ln() - self.rate * (x - self.x_min)
    }

    pub fn ccdf(&self, x: f64) -> f64 {
        (-self.rate * (x - self.x_min)).exp()
    }
}

/// Exponential MLE on the samples at or above `x_min`.
pub fn fit_exponential_tail(samples: &[f64], x_min: f64) -> Result<ExponentialFit, FitError> {
    let tail: Vec<f64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    if tail.is_empty() {
        return Err(FitError::TooFewSamples { needed: 1, got: 0 });
    }
    let excess: f64 = tail.iter().map(|x| x - x_min).sum();
    if !(excess > 0.0) {
        return Err(FitError::Degenerate("every tail sample equals x_min".into()));
    }
    let k = tail.len() as f64;
    let rate = k / excess;
    Ok(ExponentialFit {
        rate,
        x_min,
        n_tail: tail.len(),
        log_likelihood: k * rate.ln() - rate * excess,
    })
}
