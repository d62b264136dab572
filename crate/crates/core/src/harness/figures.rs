use std::path::{Path, PathBuf};

use super::experiment::{run_experiment, Curve};
use super::output::{analysis_curves, write_curve_csv, SPEC_FILE};
use super::{ExperimentSpec, HarnessError};
use crate::engine::TrialOutput;
use crate::stats::{log_returns, volume_volatility};

pub const FIGURES: std::ops::RangeInclusive<u32> = 2..=15;

/// Spec of the smallest experiment that yields `figure`: single-trial
/// figures drop to one trial, analyses the figure does not plot are
/// switched off, and figure 15 runs the extreme state `B = 1`.
pub fn figure_spec(figure: u32, base: &ExperimentSpec) -> Result<ExperimentSpec, HarnessError> {
    if !FIGURES.contains(&figure) {
        return Err(HarnessError::UnknownFigure(figure));
    }
    let mut spec = base.clone();
    spec.analyses.powerlaw = figure == 5;
    spec.analyses.garch = figure == 10;
    spec.analyses.inverse_statistics = figure == 13;
    if matches!(figure, 2 | 8 | 14 | 15) {
        spec.trials = 1;
    }
    if figure == 15 {
        spec.game.board_lot = 1;
    }
    Ok(spec)
}

fn series(y: impl Iterator<Item = f64>) -> Curve {
    let y: Vec<f64> = y.collect();
    Curve {
        x: (1..=y.len()).map(|t| t as f64).collect(),
        y,
        band: None,
    }
}

fn trial_curves(figure: u32, spec: &ExperimentSpec, trial: &TrialOutput) -> Result<Vec<(String, Curve)>, HarnessError> {
    let returns = || {
        log_returns(&trial.prices, 1)
            .map(|r| r.values)
            .map_err(|e| HarnessError::Analysis {
                trial: Some(0),
                what: "returns",
                message: e.to_string(),
            })
    };
    let curves = match figure {
        2 => vec![("returns".to_string(), series(returns()?.into_iter()))],
        8 => {
            let dt = spec.analyses.volume_scales[0];
            let r = returns()?;
            let buy: Vec<f64> = trial.records.iter().map(|s| s.buy_volume as f64).collect();
            let sell: Vec<f64> = trial.records.iter().map(|s| s.sell_volume as f64).collect();
            let vv = volume_volatility(&buy, &sell, &r, dt).map_err(|e| HarnessError::Analysis {
                trial: Some(0),
                what: "volume/volatility",
                message: e.to_string(),
            })?;
            vec![(
                format!("volume_volatility_dt{dt}"),
                Curve {
                    x: vv.volume,
                    y: vv.volatility,
                    band: None,
                },
            )]
        }
        14 => vec![
            ("buyers".to_string(), series(trial.records.iter().map(|s| s.n_buyers as f64))),
            ("sellers".to_string(), series(trial.records.iter().map(|s| s.n_sellers as f64))),
        ],
        15 => vec![(
            "price_changes".to_string(),
            series(trial.records.iter().map(|s| s.price_change)),
        )],
        _ => Vec::new(),
    };
    Ok(curves)
}

fn analysis_files(figure: u32) -> &'static [&'static str] {
    match figure {
        3 => &["return_density"],
        4 => &["positive_ccdf", "negative_ccdf"],
        5 => &["positive_ccdf", "powerlaw_fit", "exponential_fit"],
        6 => &["return_acf", "volatility_acf"],
        7 => &["volatility_acf", "volatility_acf_fit"],
        8 => &["volume_correlation"],
        9 => &["kurtosis"],
        10 => &["return_density", "residual_density"],
        11 => &["lead_lag", "lead_lag_asymmetry"],
        12 => &["leverage"],
        13 => &["horizon_gain", "horizon_loss"],
        _ => &[],
    }
}

/// Runs the experiment behind `figure` and writes its plottable CSVs and
/// the spec used into `dir`.
pub fn reproduce_figure(figure: u32, base: &ExperimentSpec, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let spec = figure_spec(figure, base)?;
    let results = run_experiment(&spec)?;
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let spec_path = dir.join(SPEC_FILE);
    std::fs::write(&spec_path, spec.to_text()).map_err(|source| HarnessError::Io {
        path: spec_path.clone(),
        source,
    })?;
    let mut written = vec![spec_path];

    let wanted = analysis_files(figure);
    let mut curves: Vec<(String, Curve)> = analysis_curves(&spec, &results.analysis)
        .into_iter()
        .filter(|(name, _)| wanted.contains(&name.as_str()))
        .collect();
    curves.extend(trial_curves(figure, &spec, &results.trials[0])?);
    for name in wanted {
        if !curves.iter().any(|(n, _)| n == name) {
            return Err(HarnessError::Analysis {
                trial: None,
                what: "figure data",
                message: format!("`{name}` could not be computed for figure {figure}"),
            });
        }
    }
    for (name, curve) in curves {
        let path = dir.join(format!("{name}.csv"));
        write_curve_csv(&curve, &path)?;
        written.push(path);
    }
    Ok(written)
}
