use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::experiment::{Analysis, Curve};
use super::ExperimentSpec;
use crate::fitting::{Favored, VUONG_SIGNIFICANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

/// Whether the model is expected to show the fact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Present,
    Absent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactEntry {
    pub name: String,
    pub expected: Expectation,
    /// `Pass` when the measurement agrees with `expected` under the
    /// stored thresholds.
    pub verdict: Verdict,
    pub measured: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StylizedFactReport {
    pub trials: usize,
    pub excluded_trials: Vec<usize>,
    pub facts: Vec<FactEntry>,
    /// Non-fact summaries: order flow and the largest price change.
    pub diagnostics: BTreeMap<String, f64>,
}

impl StylizedFactReport {
    pub fn fact(&self, name: &str) -> Option<&FactEntry> {
        self.facts.iter().find(|f| f.name == name)
    }
}

pub const FACT_NAMES: [&str; 11] = [
    "volatility clustering",
    "intermittency",
    "heavy tails",
    "absence of autocorrelation in returns",
    "slow decay of autocorrelation in volatilities",
    "volume/volatility correlation",
    "aggregational gaussianity",
    "conditional heavy tails",
    "asymmetry in time scales",
    "leverage effect",
    "gain/loss asymmetry",
];

/// Thresholds behind every verdict. They are written next to the measured
/// values so a change of threshold is visible in the report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub vuong_p: f64,
    /// Lags of the return ACF that must stay inside the band.
    pub quiet_lags: (usize, usize),
    pub quiet_fraction: f64,
    /// Accepted range of the first lag inside the band.
    pub entry_lag: (usize, usize),
    pub decay_rate: (f64, f64),
    pub positive_fraction: f64,
    pub clustering_lags: usize,
    pub volume_correlation: f64,
    pub volume_scale: usize,
    pub volume_trend_until: usize,
    pub gaussianity_scales: (usize, usize, usize),
    pub intermittency_until: usize,
    pub asymmetry_lags: usize,
    pub leverage_depth: f64,
    pub leverage_near: (i64, i64),
    pub leverage_far: (i64, i64),
    pub leverage_ratio: f64,
    pub ks_alpha: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            alpha_min: 2.0,
            alpha_max: 5.0,
            vuong_p: VUONG_SIGNIFICANCE,
            quiet_lags: (20, 100),
            quiet_fraction: 0.9,
            entry_lag: (4, 24),
            decay_rate: (3e-3, 1.2e-2),
            positive_fraction: 0.9,
            clustering_lags: 100,
            volume_correlation: 0.6,
            volume_scale: 5,
            volume_trend_until: 20,
            gaussianity_scales: (20, 80, 1280),
            intermittency_until: 80,
            asymmetry_lags: 3,
            leverage_depth: -5.0,
            leverage_near: (1, 10),
            leverage_far: (-50, -10),
            leverage_ratio: 0.25,
            ks_alpha: 0.05,
        }
    }
}

struct Entry {
    measured: BTreeMap<String, f64>,
    thresholds: BTreeMap<String, f64>,
    note: Option<String>,
}

impl Entry {
    fn new() -> Self {
        Self {
            measured: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            note: None,
        }
    }
    fn m(&mut self, k: &str, v: f64) -> &mut Self {
        self.measured.insert(k.to_string(), v);
        self
    }
    fn t(&mut self, k: &str, v: f64) -> &mut Self {
        self.thresholds.insert(k.to_string(), v);
        self
    }
}

fn verdict(ok: Option<bool>) -> Verdict {
    match ok {
        Some(true) => Verdict::Pass,
        Some(false) => Verdict::Fail,
        None => Verdict::NotApplicable,
    }
}

fn lag_range(curve: &Curve, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
    curve
        .x
        .iter()
        .zip(&curve.y)
        .filter(move |(&x, _)| x >= lo && x <= hi)
        .map(|(&x, &y)| (x, y))
}

pub fn build_report(spec: &ExperimentSpec, analysis: &Analysis) -> StylizedFactReport {
    build_report_with(spec, analysis, &Thresholds::default())
}

pub fn build_report_with(
    spec: &ExperimentSpec,
    a: &Analysis,
    th: &Thresholds,
) -> StylizedFactReport {
    let mut facts = Vec::with_capacity(FACT_NAMES.len());
    let mut push = |name: &str, expected: Expectation, ok: Option<bool>, e: Entry| {
        facts.push(FactEntry {
            name: name.to_string(),
            expected,
            verdict: verdict(ok),
            measured: e.measured,
            thresholds: e.thresholds,
            note: e.note,
        });
    };

    // Volatility clustering: |r| stays significantly autocorrelated over
    // the first `clustering_lags` lags.
    {
        let mut e = Entry::new();
        e.t("max_lag", th.clustering_lags as f64);
        let ok = a.volatility_acf.as_ref().and_then(|c| {
            let band = c.band?;
            let min = lag_range(c, 1.0, th.clustering_lags as f64)
                .map(|(_, y)| y)
                .fold(f64::INFINITY, f64::min);
            e.m("min_volatility_acf", min).m("volatility_acf_lag1", c.at(1.0)?).t("band", band);
            Some(min > band)
        });
        push(FACT_NAMES[0], Expectation::Present, ok, e);
    }

    // Intermittency: bursts at every short time scale, i.e. positive
    // excess kurtosis of aggregated returns up to `intermittency_until`.
    {
        let mut e = Entry::new();
        e.t("max_scale", th.intermittency_until as f64).t("min_excess_kurtosis", 0.0);
        let ok = a.kurtosis.as_ref().and_then(|c| {
            let vals: Vec<f64> = lag_range(c, 1.0, th.intermittency_until as f64).map(|(_, y)| y).collect();
            if vals.is_empty() {
                return None;
            }
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            e.m("min_excess_kurtosis", min).m("scales", vals.len() as f64);
            Some(min > 0.0)
        });
        push(FACT_NAMES[1], Expectation::Present, ok, e);
    }

    {
        let mut e = Entry::new();
        e.t("alpha_min", th.alpha_min).t("alpha_max", th.alpha_max).t("vuong_p", th.vuong_p);
        let ok = a.tails.as_ref().map(|t| {
            e.m("alpha", t.power_law.alpha)
                .m("x_min", t.power_law.x_min)
                .m("n_tail", t.power_law.n_tail as f64)
                .m("n_pooled", t.n_pooled as f64)
                .m("ks_distance", t.power_law.ks_distance)
                .m("exponential_rate", t.exponential.rate)
                .m("vuong_lr", t.vuong.lr)
                .m("vuong_p", t.vuong.p_value);
            (th.alpha_min..=th.alpha_max).contains(&t.power_law.alpha)
                && t.vuong.favored == Favored::First
                && t.vuong.p_value < th.vuong_p
        });
        push(FACT_NAMES[2], Expectation::Present, ok, e);
    }

    {
        let mut e = Entry::new();
        let (lo, hi) = th.quiet_lags;
        e.t("quiet_lag_min", lo as f64)
            .t("quiet_lag_max", hi as f64)
            .t("quiet_fraction", th.quiet_fraction)
            .t("entry_lag_min", th.entry_lag.0 as f64)
            .t("entry_lag_max", th.entry_lag.1 as f64);
        let ok = a.return_acf.as_ref().and_then(|c| {
            let band = c.band?;
            let inside: Vec<bool> = lag_range(c, lo as f64, hi as f64).map(|(_, y)| y.abs() < band).collect();
            if inside.is_empty() {
                return None;
            }
            let frac = inside.iter().filter(|&&b| b).count() as f64 / inside.len() as f64;
            let entry = lag_range(c, 1.0, f64::INFINITY).find(|(_, y)| y.abs() < band).map(|(x, _)| x);
            e.m("inside_fraction", frac).t("band", band);
            if let Some(l) = entry {
                e.m("entry_lag", l);
            }
            let entry_ok = entry
                .is_some_and(|l| l >= th.entry_lag.0 as f64 && l <= th.entry_lag.1 as f64);
            Some(frac >= th.quiet_fraction && entry_ok)
        });
        push(FACT_NAMES[3], Expectation::Present, ok, e);
    }

    {
        let mut e = Entry::new();
        e.t("rate_min", th.decay_rate.0)
            .t("rate_max", th.decay_rate.1)
            .t("positive_fraction", th.positive_fraction)
            .t("fit_lag_min", spec.analyses.decay_fit_min_lag as f64)
            .t("fit_lag_max", spec.analyses.decay_fit_max_lag as f64);
        let ok = a.volatility_acf.as_ref().and_then(|c| {
            let lags: Vec<f64> = lag_range(c, 1.0, f64::INFINITY).map(|(_, y)| y).collect();
            let frac = lags.iter().filter(|&&y| y > 0.0).count() as f64 / lags.len().max(1) as f64;
            e.m("positive_fraction", frac);
            match &a.volatility_decay {
                Some(d) => {
                    e.m("amplitude", d.amplitude).m("rate", d.rate);
                    Some(
                        d.rate >= th.decay_rate.0
                            && d.rate <= th.decay_rate.1
                            && frac >= th.positive_fraction,
                    )
                }
                None => {
                    e.note = Some("exponential fit failed: non-positive correlation in fit range".into());
                    Some(false)
                }
            }
        });
        push(FACT_NAMES[4], Expectation::Present, ok, e);
    }

    {
        let mut e = Entry::new();
        e.t("min_correlation", th.volume_correlation)
            .t("scale", th.volume_scale as f64)
            .t("trend_until", th.volume_trend_until as f64);
        let ok = a.volume_correlation.as_ref().and_then(|c| {
            for (x, y) in c.x.iter().zip(&c.y) {
                e.m(&format!("correlation_dt{x}"), *y);
            }
            let base = c.at(th.volume_scale as f64)?;
            let trend: Vec<f64> = lag_range(c, th.volume_scale as f64, th.volume_trend_until as f64)
                .map(|(_, y)| y)
                .collect();
            let rising = trend.windows(2).all(|w| w[1] >= w[0]);
            Some(base >= th.volume_correlation && rising)
        });
        push(FACT_NAMES[5], Expectation::Present, ok, e);
    }

    {
        let mut e = Entry::new();
        let (s1, s2, s3) = th.gaussianity_scales;
        e.t("scale_short", s1 as f64).t("scale_mid", s2 as f64).t("scale_long", s3 as f64);
        let ok = a.kurtosis.as_ref().and_then(|c| {
            let (k1, k2, k3) = (c.at(s1 as f64)?, c.at(s2 as f64)?, c.at(s3 as f64)?);
            e.m("kurtosis_short", k1).m("kurtosis_mid", k2).m("kurtosis_long", k3);
            Some(k3 < k2 && k2 < k1)
        });
        push(FACT_NAMES[6], Expectation::Present, ok, e);
    }

    {
        let mut e = Entry::new();
        e.t("residual_kurtosis_min", 0.0);
        let ok = (!a.garch.is_empty()).then(|| {
            let n = a.garch.len() as f64;
            let raw = a.garch.iter().map(|g| g.raw_kurtosis).sum::<f64>() / n;
            let res = a.garch.iter().map(|g| g.residual_kurtosis).sum::<f64>() / n;
            let mean = |f: &dyn Fn(&super::experiment::GarchTrial) -> f64| {
                a.garch.iter().map(f).sum::<f64>() / n
            };
            e.m("raw_kurtosis", raw)
                .m("residual_kurtosis", res)
                .m("a0", mean(&|g| g.params.a0))
                .m("a1", mean(&|g| g.params.a1))
                .m("b1", mean(&|g| g.params.b1))
                .m("converged_fraction", mean(&|g| g.converged as u8 as f64));
            res > 0.0 && res < raw
        });
        push(FACT_NAMES[7], Expectation::Present, ok, e);
    }

    {
        let mut e = Entry::new();
        e.t("lags", th.asymmetry_lags as f64);
        let ok = a.lead_lag_asymmetry.as_ref().and_then(|c| {
            let band = c.band?;
            e.t("band", band);
            let mut all_negative = true;
            for tau in 1..=th.asymmetry_lags {
                let d = c.at(tau as f64)?;
                e.m(&format!("asymmetry_{tau}"), d);
                all_negative &= d < 0.0;
            }
            Some(all_negative && c.at(1.0)? < -band)
        });
        push(FACT_NAMES[8], Expectation::Present, ok, e);
    }

    {
        let mut e = Entry::new();
        e.t("depth", th.leverage_depth).t("far_ratio", th.leverage_ratio);
        let ok = a.leverage.as_ref().and_then(|c| {
            let near: Vec<f64> = lag_range(c, th.leverage_near.0 as f64, th.leverage_near.1 as f64)
                .map(|(_, y)| y)
                .collect();
            let far: Vec<f64> = lag_range(c, th.leverage_far.0 as f64, th.leverage_far.1 as f64)
                .map(|(_, y)| y.abs())
                .collect();
            if near.is_empty() || far.is_empty() {
                return None;
            }
            let min = near.iter().copied().fold(f64::INFINITY, f64::min);
            let far_mean = far.iter().sum::<f64>() / far.len() as f64;
            e.m("min_near", min).m("mean_abs_far", far_mean);
            Some(min <= th.leverage_depth && far_mean < th.leverage_ratio * min.abs())
        });
        push(FACT_NAMES[9], Expectation::Present, ok, e);
    }

    {
        let mut e = Entry::new();
        e.t("ks_alpha", th.ks_alpha);
        let ok = a.inverse.as_ref().map(|inv| {
            e.m("theta", inv.theta)
                .m("ks_statistic", inv.ks_statistic)
                .m("n_gain", inv.n_gain as f64)
                .m("n_loss", inv.n_loss as f64)
                .m("starts_gain", inv.starts_gain as f64)
                .m("starts_loss", inv.starts_loss as f64)
                .m("mean_gain_horizon", inv.mean_gain_horizon)
                .m("mean_loss_horizon", inv.mean_loss_horizon)
                .t("ks_critical", inv.ks_critical)
                .t("ks_critical_nominal", inv.ks_critical_nominal);
            inv.ks_statistic < inv.ks_critical
        });
        e.note = Some("expected absent: gain and loss horizons should not differ".into());
        push(FACT_NAMES[10], Expectation::Absent, ok, e);
    }

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("mean_buyers".to_string(), a.order_flow.mean_buyers);
    diagnostics.insert("mean_sellers".to_string(), a.order_flow.mean_sellers);
    diagnostics.insert("mean_orderers".to_string(), a.order_flow.mean_orderers);
    diagnostics.insert("max_abs_price_change".to_string(), a.max_abs_price_change);

    StylizedFactReport {
        trials: a.n_trials,
        excluded_trials: a.excluded_trials.clone(),
        facts,
        diagnostics,
    }
}
