use std::collections::BTreeMap;

use rayon::prelude::*;

use super::report::{build_report, StylizedFactReport};
use super::{ExperimentSpec, HarnessError};
use crate::engine::{run_trial, GameConfig, TrialOutput};
use crate::fitting::{
    fit_exponential_tail, fit_garch11, fit_powerlaw_tail, garch_residuals, vuong_test,
    ExponentialFit, GarchParams, PowerLawFit, VuongResult,
};
use crate::rng::trial_seed;
use crate::stats::{
    autocorrelation, coarse_fine_volatility, excess_kurtosis,
    fit_exponential_decay, inverse_statistics, ks_critical_value, ks_statistic, kurtosis_curve,
    lead_lag_asymmetry, leverage, log_returns, normalize, volume_volatility, ExponentialDecay,
    LevelSign, StatsError,
};

/// Plottable series: `y` against `x`, with an optional symmetric
/// significance band.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub band: Option<f64>,
}

impl Curve {
    pub fn at(&self, x: f64) -> Option<f64> {
        self.x.iter().position(|&v| v == x).map(|i| self.y[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailAnalysis {
    /// Positive normalized returns pooled over the included trials.
    pub n_pooled: usize,
    pub power_law: PowerLawFit,
    pub exponential: ExponentialFit,
    pub vuong: VuongResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GarchTrial {
    pub trial: usize,
    pub params: GarchParams,
    pub log_likelihood: f64,
    pub converged: bool,
    /// Excess kurtosis of the normalized returns.
    pub raw_kurtosis: f64,
    /// Excess kurtosis of the standardized residuals.
    pub residual_kurtosis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseAnalysis {
    pub theta: f64,
    /// Trial-averaged probability of each investment horizon.
    pub gain: BTreeMap<usize, f64>,
    pub loss: BTreeMap<usize, f64>,
    pub ks_statistic: f64,
    /// 5% two-sample critical value for `n_gain` and `n_loss`.
    pub ks_critical: f64,
    /// Effective sample sizes: uncensored horizons over all trials divided
    /// by the mean horizon. Horizons from neighbouring start times share
    /// the same passage and are not independent draws.
    pub n_gain: usize,
    pub n_loss: usize,
    /// Uncensored horizons over all trials, one per start time.
    pub starts_gain: u64,
    pub starts_loss: u64,
    /// Critical value if every start counted as an independent draw.
    pub ks_critical_nominal: f64,
    pub mean_gain_horizon: f64,
    pub mean_loss_horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFlow {
    pub mean_buyers: f64,
    pub mean_sellers: f64,
    pub mean_orderers: f64,
}

/// Multi-trial diagnostics. Curves are pointwise means over the included
/// trials; tail fits pool the included trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub n_trials: usize,
    /// Trials whose price went non-positive; they have no log returns and
    /// are left out of every return-based diagnostic.
    pub excluded_trials: Vec<usize>,
    pub return_acf: Option<Curve>,
    pub volatility_acf: Option<Curve>,
    pub volatility_decay: Option<ExponentialDecay>,
    pub kurtosis: Option<Curve>,
    /// Mean volume/volatility correlation per window length.
    pub volume_correlation: Option<Curve>,
    pub lead_lag: Option<Curve>,
    /// `rho_cf(tau) - rho_cf(-tau)`, `tau >= 1`.
    pub lead_lag_asymmetry: Option<Curve>,
    pub leverage: Option<Curve>,
    /// Density of the pooled normalized returns.
    pub return_density: Option<Curve>,
    pub positive_ccdf: Option<Curve>,
    pub negative_ccdf: Option<Curve>,
    pub tails: Option<TailAnalysis>,
    pub garch: Vec<GarchTrial>,
    /// Density of the pooled GARCH residuals.
    pub residual_density: Option<Curve>,
    pub inverse: Option<InverseAnalysis>,
    pub order_flow: OrderFlow,
    pub max_abs_price_change: f64,
}

pub struct ExperimentResults {
    pub spec: ExperimentSpec,
    pub trials: Vec<TrialOutput>,
    pub analysis: Analysis,
    pub report: StylizedFactReport,
}

/// Configuration of trial `index`: the game of `spec` re-seeded from the
/// master seed.
pub fn trial_config(spec: &ExperimentSpec, index: usize) -> GameConfig {
    GameConfig {
        seed: trial_seed(spec.game.seed, index as u64),
        ..spec.game.clone()
    }
}

/// Runs every trial of `spec` and analyzes the result.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResults, HarnessError> {
    spec.validate()?;
    let trials = (0..spec.trials)
        .into_par_iter()
        .map(|k| run_trial(&trial_config(spec, k)).map_err(|source| HarnessError::Engine { trial: k, source }))
        .collect::<Result<Vec<_>, _>>()?;
    let analysis = analyze_trials(spec, &trials)?;
    let report = build_report(spec, &analysis);
    Ok(ExperimentResults {
        spec: spec.clone(),
        trials,
        analysis,
        report,
    })
}

/// Per-trial diagnostics, computed in the worker that owns the trial.
#[derive(Default)]
struct TrialStats {
    return_acf: Vec<f64>,
    return_band: f64,
    volatility_acf: Vec<f64>,
    kurtosis: BTreeMap<usize, f64>,
    volume_correlation: Vec<f64>,
    lead_lag: Vec<f64>,
    lead_lag_band: f64,
    leverage: Vec<f64>,
    normalized: Vec<f64>,
    garch: Option<(GarchParams, f64, bool, f64, f64, Vec<f64>)>,
}

fn analysis_error(trial: Option<usize>, what: &'static str, e: impl ToString) -> HarnessError {
    HarnessError::Analysis {
        trial,
        what,
        message: e.to_string(),
    }
}

fn trial_stats(spec: &ExperimentSpec, k: usize, trial: &TrialOutput) -> Result<TrialStats, HarnessError> {
    let a = &spec.analyses;
    let err = |what: &'static str| move |e: StatsError| analysis_error(Some(k), what, e);
    let r = log_returns(&trial.prices, 1).map_err(err("returns"))?.values;
    let mut out = TrialStats::default();

    let racf = autocorrelation(&r, a.return_acf_max_lag).map_err(err("return autocorrelation"))?;
    out.return_band = racf.band_halfwidth;
    out.return_acf = racf.correlations;
    let abs: Vec<f64> = r.iter().map(|x| x.abs()).collect();
    out.volatility_acf = autocorrelation(&abs, a.volatility_acf_max_lag)
        .map_err(err("volatility autocorrelation"))?
        .correlations;

    let kc = kurtosis_curve(&r, &a.kurtosis_scales).map_err(err("kurtosis"))?;
    out.kurtosis = kc.scales.iter().copied().zip(kc.kurtoses.iter().copied()).collect();

    let buy: Vec<f64> = trial.records.iter().map(|s| s.buy_volume as f64).collect();
    let sell: Vec<f64> = trial.records.iter().map(|s| s.sell_volume as f64).collect();
    for &dt in &a.volume_scales {
        let vv = volume_volatility(&buy, &sell, &r, dt).map_err(err("volume/volatility"))?;
        out.volume_correlation.push(vv.correlation);
    }

    let (coarse, fine) = coarse_fine_volatility(&r, a.lead_lag).map_err(err("coarse/fine volatility"))?;
    let ll = lead_lag_asymmetry(&coarse, &fine, a.lead_lag_max_lag).map_err(err("lead-lag"))?;
    out.lead_lag = ll.rho_cf;
    out.lead_lag_band = ll.band_halfwidth;

    out.leverage = leverage(&r, a.leverage_max_lag).map_err(err("leverage"))?.values;

    out.normalized = normalize(&r).map_err(err("normalization"))?;
    if a.garch {
        let fit = fit_garch11(&out.normalized).map_err(|e| analysis_error(Some(k), "GARCH fit", e))?;
        let resid = garch_residuals(&out.normalized, &fit.params)
            .map_err(|e| analysis_error(Some(k), "GARCH residuals", e))?;
        let raw = excess_kurtosis(&out.normalized)
            .ok_or_else(|| analysis_error(Some(k), "kurtosis", "undefined"))?;
        let res = excess_kurtosis(&resid)
            .ok_or_else(|| analysis_error(Some(k), "residual kurtosis", "undefined"))?;
        out.garch = Some((fit.params, fit.log_likelihood, fit.converged, raw, res, resid));
    }
    Ok(out)
}

fn mean_curve<'a>(
    x: Vec<f64>,
    rows: impl Iterator<Item = &'a [f64]>,
    band: Option<f64>,
) -> Curve {
    let mut sum = vec![0.0; x.len()];
    let mut n = 0usize;
    for row in rows {
        for (s, v) in sum.iter_mut().zip(row) {
            *s += v;
        }
        n += 1;
    }
    Curve {
        x,
        y: sum.into_iter().map(|s| s / n as f64).collect(),
        band,
    }
}

fn average_histograms<'a>(
    maps: impl ExactSizeIterator<Item = &'a BTreeMap<usize, f64>>,
) -> BTreeMap<usize, f64> {
    let n = maps.len() as f64;
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for m in maps {
        for (&t, &p) in m {
            *acc.entry(t).or_default() += p;
        }
    }
    acc.values_mut().for_each(|p| *p /= n);
    acc
}

fn density(values: &[f64], width: f64) -> Curve {
    let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
    for v in values {
        *bins.entry((v / width).floor() as i64).or_default() += 1;
    }
    let n = values.len() as f64;
    Curve {
        x: bins.keys().map(|&b| (b as f64 + 0.5) * width).collect(),
        y: bins.values().map(|&c| c as f64 / (n * width)).collect(),
        band: None,
    }
}

/// Empirical `Pr[X >= x]` of positive samples, thinned to roughly
/// `points` log-spaced ranks.
fn ccdf(values: &mut [f64], points: usize) -> Curve {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let mut ranks: Vec<usize> = (0..points)
        .map(|i| ((n as f64).powf(i as f64 / (points - 1).max(1) as f64)).round() as usize)
        .filter(|&k| k >= 1 && k <= n)
        .collect();
    ranks.dedup();
    ranks.reverse();
    Curve {
        x: ranks.iter().map(|&k| values[n - k]).collect(),
        y: ranks.iter().map(|&k| k as f64 / n as f64).collect(),
        band: None,
    }
}

/// Diagnostics of already simulated trials. Trial `k` of `trials` is
/// assumed to have been produced by [`trial_config`]`(spec, k)`.
pub fn analyze_trials(spec: &ExperimentSpec, trials: &[TrialOutput]) -> Result<Analysis, HarnessError> {
    let a = &spec.analyses;
    let excluded_trials: Vec<usize> = (0..trials.len()).filter(|&k| !trials[k].prices_positive()).collect();
    let stats: Vec<(usize, TrialStats)> = trials
        .par_iter()
        .enumerate()
        .filter(|(_, t)| t.prices_positive())
        .map(|(k, t)| trial_stats(spec, k, t).map(|s| (k, s)))
        .collect::<Result<_, _>>()?;

    let lags = |max: usize| (0..=max).map(|l| l as f64).collect::<Vec<_>>();
    let signed_lags = |max: usize| (-(max as i64)..=max as i64).map(|l| l as f64).collect::<Vec<_>>();
    let have = !stats.is_empty();
    let first = stats.first().map(|(_, s)| s);

    let return_acf = have.then(|| {
        mean_curve(
            lags(a.return_acf_max_lag),
            stats.iter().map(|(_, s)| s.return_acf.as_slice()),
            first.map(|s| s.return_band),
        )
    });
    let volatility_acf = have.then(|| {
        mean_curve(
            lags(a.volatility_acf_max_lag),
            stats.iter().map(|(_, s)| s.volatility_acf.as_slice()),
            first.map(|s| s.return_band),
        )
    });
    let volatility_decay = volatility_acf.as_ref().and_then(|c| {
        let acf = crate::stats::AcfCurve {
            lags: c.x.iter().map(|&l| l as usize).collect(),
            correlations: c.y.clone(),
            band_halfwidth: c.band.unwrap_or(0.0),
            n: 0,
        };
        fit_exponential_decay(&acf, a.decay_fit_min_lag..=a.decay_fit_max_lag).ok()
    });

    let kurtosis = have.then(|| {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for &scale in &a.kurtosis_scales {
            let vals: Vec<f64> = stats.iter().filter_map(|(_, s)| s.kurtosis.get(&scale).copied()).collect();
            if !vals.is_empty() {
                x.push(scale as f64);
                y.push(vals.iter().sum::<f64>() / vals.len() as f64);
            }
        }
        Curve { x, y, band: None }
    });
    let volume_correlation = have.then(|| {
        mean_curve(
            a.volume_scales.iter().map(|&s| s as f64).collect(),
            stats.iter().map(|(_, s)| s.volume_correlation.as_slice()),
            None,
        )
    });
    let lead_lag = have.then(|| {
        mean_curve(
            signed_lags(a.lead_lag_max_lag),
            stats.iter().map(|(_, s)| s.lead_lag.as_slice()),
            first.map(|s| s.lead_lag_band),
        )
    });
    let lead_lag_asymmetry = lead_lag.as_ref().map(|c| {
        let m = a.lead_lag_max_lag;
        Curve {
            x: (1..=m).map(|t| t as f64).collect(),
            y: (1..=m).map(|t| c.y[m + t] - c.y[m - t]).collect(),
            band: c.band,
        }
    });
    let leverage = have.then(|| {
        mean_curve(
            signed_lags(a.leverage_max_lag),
            stats.iter().map(|(_, s)| s.leverage.as_slice()),
            None,
        )
    });

    let pooled: Vec<f64> = stats.iter().flat_map(|(_, s)| s.normalized.iter().copied()).collect();
    let positive: Vec<f64> = pooled.iter().copied().filter(|&z| z > 0.0).collect();
    let mut negative: Vec<f64> = pooled.iter().filter(|&&z| z < 0.0).map(|z| -z).collect();
    let return_density = have.then(|| density(&pooled, 0.1));
    let positive_ccdf = (!positive.is_empty()).then(|| ccdf(&mut positive.clone(), 400));
    let negative_ccdf = (!negative.is_empty()).then(|| ccdf(&mut negative, 400));

    let tails = if a.powerlaw && have {
        let pl = fit_powerlaw_tail(&positive).map_err(|e| analysis_error(None, "power-law fit", e))?;
        let ex = fit_exponential_tail(&positive, pl.x_min)
            .map_err(|e| analysis_error(None, "exponential fit", e))?;
        let vuong = vuong_test(&positive, &pl, &ex).map_err(|e| analysis_error(None, "Vuong test", e))?;
        Some(TailAnalysis {
            n_pooled: pooled.iter().filter(|&&z| z > 0.0).count(),
            power_law: pl,
            exponential: ex,
            vuong,
        })
    } else {
        None
    };

    let garch: Vec<GarchTrial> = stats
        .iter()
        .filter_map(|(k, s)| {
            s.garch.as_ref().map(|(params, ll, converged, raw, res, _)| GarchTrial {
                trial: *k,
                params: *params,
                log_likelihood: *ll,
                converged: *converged,
                raw_kurtosis: *raw,
                residual_kurtosis: *res,
            })
        })
        .collect();
    let residual_density = (!garch.is_empty()).then(|| {
        let resid: Vec<f64> = stats
            .iter()
            .filter_map(|(_, s)| s.garch.as_ref())
            .flat_map(|g| g.5.iter().copied())
            .collect();
        density(&normalize(&resid).unwrap_or(resid), 0.1)
    });

    let inverse = if a.inverse_statistics && have {
        let included: Vec<usize> = stats.iter().map(|(k, _)| *k).collect();
        let dists = included
            .par_iter()
            .map(|&k| {
                let g = inverse_statistics(&trials[k].prices, a.inverse_theta, LevelSign::Gain);
                let l = inverse_statistics(&trials[k].prices, a.inverse_theta, LevelSign::Loss);
                match (g, l) {
                    (Ok(g), Ok(l)) => Ok((g, l)),
                    (Err(e), _) | (_, Err(e)) => Err(analysis_error(Some(k), "inverse statistics", e)),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let gain = average_histograms(dists.iter().map(|d| &d.0.histogram));
        let loss = average_histograms(dists.iter().map(|d| &d.1.histogram));
        let starts_gain: u64 = dists.iter().map(|d| d.0.observed_count).sum();
        let starts_loss: u64 = dists.iter().map(|d| d.1.observed_count).sum();
        let mean_horizon = |h: &BTreeMap<usize, f64>| {
            let mass: f64 = h.values().sum();
            h.iter().map(|(&t, &p)| t as f64 * p).sum::<f64>() / mass
        };
        let mean_gain_horizon = mean_horizon(&gain);
        let mean_loss_horizon = mean_horizon(&loss);
        let effective = |starts: u64, mean: f64| {
            if mean.is_finite() && mean > 0.0 {
                ((starts as f64 / mean).round() as usize).max(1)
            } else {
                0
            }
        };
        let n_gain = effective(starts_gain, mean_gain_horizon);
        let n_loss = effective(starts_loss, mean_loss_horizon);
        let critical = |n: usize, m: usize| {
            if n > 0 && m > 0 {
                ks_critical_value(n, m, 0.05)
            } else {
                f64::INFINITY
            }
        };
        Some(InverseAnalysis {
            theta: a.inverse_theta,
            ks_statistic: ks_statistic(&gain, &loss),
            ks_critical: critical(n_gain, n_loss),
            ks_critical_nominal: critical(starts_gain as usize, starts_loss as usize),
            gain,
            loss,
            n_gain,
            n_loss,
            starts_gain,
            starts_loss,
            mean_gain_horizon,
            mean_loss_horizon,
        })
    } else {
        None
    };

    let steps: usize = trials.iter().map(|t| t.records.len()).sum();
    let total = |f: &dyn Fn(&crate::engine::StepRecord) -> usize| {
        trials.iter().flat_map(|t| &t.records).map(f).sum::<usize>() as f64 / steps.max(1) as f64
    };
    let mean_buyers = total(&|s| s.n_buyers);
    let mean_sellers = total(&|s| s.n_sellers);
    let order_flow = OrderFlow {
        mean_buyers,
        mean_sellers,
        mean_orderers: mean_buyers + mean_sellers,
    };
    let max_abs_price_change = trials
        .iter()
        .flat_map(|t| &t.records)
        .map(|s| s.price_change.abs())
        .fold(0.0, f64::max);

    Ok(Analysis {
        n_trials: trials.len(),
        excluded_trials,
        return_acf,
        volatility_acf,
        volatility_decay,
        kurtosis,
        volume_correlation,
        lead_lag,
        lead_lag_asymmetry,
        leverage,
        return_density,
        positive_ccdf,
        negative_ccdf,
        tails,
        garch,
        residual_density,
        inverse,
        order_flow,
        max_abs_price_change,
    })
}
