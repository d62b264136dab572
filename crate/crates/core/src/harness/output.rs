use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::experiment::{analyze_trials, Analysis, Curve, ExperimentResults};
use super::report::{build_report, StylizedFactReport};
use super::spec::{parse_spec, ExperimentSpec};
use super::HarnessError;
use crate::engine::{Amount, StepRecord, TrialOutput};

pub const TRIAL_HEADER: &str = "t,p,dp,h,P,D,q_buy,q_sell,n_buyers,n_sellers,n_replaced";
pub const SPEC_FILE: &str = "spec.toml";
pub const REPORT_FILE: &str = "report.json";
pub const TRIALS_DIR: &str = "trials";
pub const CURVES_DIR: &str = "curves";

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// 17 significant digits: enough to read back the identical `f64`.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>, HarnessError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_error(parent))?;
    }
    Ok(std::io::BufWriter::new(fs::File::create(path).map_err(io_error(path))?))
}

/// One row per time step; row `t = 0` holds the initial prices and zero
/// flows.
pub fn write_trial_csv(trial: &TrialOutput, path: &Path) -> Result<(), HarnessError> {
    let mut w = create(path)?;
    let mut body = String::with_capacity(trial.prices.len() * 120);
    body.push_str(TRIAL_HEADER);
    body.push('\n');
    for t in 0..trial.prices.len() {
        let r = if t == 0 {
            StepRecord {
                excess_demand: 0,
                price_change: 0.0,
                quantized_move: 0,
                buy_volume: 0,
                sell_volume: 0,
                n_buyers: 0,
                n_sellers: 0,
                n_replaced: 0,
            }
        } else {
            trial.records[t - 1]
        };
        use std::fmt::Write as _;
        writeln!(
            body,
            "{t},{},{},{},{},{},{},{},{},{},{}",
            float(trial.prices[t]),
            float(r.price_change),
            r.quantized_move,
            trial.cognitive_prices[t],
            r.excess_demand,
            r.buy_volume,
            r.sell_volume,
            r.n_buyers,
            r.n_sellers,
            r.n_replaced
        )
        .unwrap();
    }
    w.write_all(body.as_bytes()).map_err(io_error(path))?;
    w.flush().map_err(io_error(path))
}

/// Reads a file written by [`write_trial_csv`]. Replacement events are not
/// stored per player, so `replacements` comes back empty.
pub fn read_trial_csv(path: &Path) -> Result<TrialOutput, HarnessError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| HarnessError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let bad = |message: String| HarnessError::Csv {
        path: path.to_path_buf(),
        message,
    };
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.iter().collect::<Vec<_>>().join(",");
    if header != TRIAL_HEADER {
        return Err(bad(format!("unexpected header `{header}`")));
    }
    let mut out = TrialOutput {
        prices: Vec::new(),
        cognitive_prices: Vec::new(),
        records: Vec::new(),
        replacements: Vec::new(),
    };
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let line = i + 2;
        let field = |c: usize| -> Result<&str, HarnessError> {
            row.get(c).ok_or_else(|| bad(format!("line {line}: missing column {c}")))
        };
        macro_rules! parse {
            ($c:expr, $t:ty) => {
                field($c)?
                    .parse::<$t>()
                    .map_err(|e| bad(format!("line {line}, column {}: {e}", $c + 1)))?
            };
        }
        let t = parse!(0, usize);
        if t != i {
            return Err(bad(format!("line {line}: expected t = {i}, found {t}")));
        }
        out.prices.push(parse!(1, f64));
        out.cognitive_prices.push(parse!(4, i64));
        if t > 0 {
            out.records.push(StepRecord {
                price_change: parse!(2, f64),
                quantized_move: parse!(3, i8),
                excess_demand: parse!(5, Amount),
                buy_volume: parse!(6, Amount),
                sell_volume: parse!(7, Amount),
                n_buyers: parse!(8, usize),
                n_sellers: parse!(9, usize),
                n_replaced: parse!(10, usize),
            });
        }
    }
    if out.prices.is_empty() {
        return Err(bad("no rows".into()));
    }
    Ok(out)
}

/// Header `x,y` or, with a band, `x,y,band`.
pub fn write_curve_csv(curve: &Curve, path: &Path) -> Result<(), HarnessError> {
    let mut w = create(path)?;
    let mut body = String::new();
    body.push_str(if curve.band.is_some() { "x,y,band\n" } else { "x,y\n" });
    for (x, y) in curve.x.iter().zip(&curve.y) {
        body.push_str(&float(*x));
        body.push(',');
        body.push_str(&float(*y));
        if let Some(b) = curve.band {
            body.push(',');
            body.push_str(&float(b));
        }
        body.push('\n');
    }
    w.write_all(body.as_bytes()).map_err(io_error(path))?;
    w.flush().map_err(io_error(path))
}

pub fn read_curve_csv(path: &Path) -> Result<Curve, HarnessError> {
    let bad = |message: String| HarnessError::Csv {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let with_band = match reader.headers().map_err(|e| bad(e.to_string()))?.len() {
        2 => false,
        3 => true,
        n => return Err(bad(format!("{n} columns"))),
    };
    let mut curve = Curve {
        x: Vec::new(),
        y: Vec::new(),
        band: None,
    };
    for row in reader.records() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let num = |c: usize| -> Result<f64, HarnessError> {
            row[c].parse().map_err(|e| bad(format!("{e}")))
        };
        curve.x.push(num(0)?);
        curve.y.push(num(1)?);
        if with_band {
            curve.band = Some(num(2)?);
        }
    }
    Ok(curve)
}

fn linspace_log(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Every diagnostic curve of `analysis`, keyed by file stem.
pub fn analysis_curves(spec: &ExperimentSpec, a: &Analysis) -> Vec<(String, Curve)> {
    let mut out: Vec<(String, Curve)> = Vec::new();
    let mut add = |name: &str, c: &Option<Curve>| {
        if let Some(c) = c {
            out.push((name.to_string(), c.clone()));
        }
    };
    add("return_acf", &a.return_acf);
    add("volatility_acf", &a.volatility_acf);
    add("kurtosis", &a.kurtosis);
    add("volume_correlation", &a.volume_correlation);
    add("lead_lag", &a.lead_lag);
    add("lead_lag_asymmetry", &a.lead_lag_asymmetry);
    add("leverage", &a.leverage);
    add("return_density", &a.return_density);
    add("residual_density", &a.residual_density);
    add("positive_ccdf", &a.positive_ccdf);
    add("negative_ccdf", &a.negative_ccdf);

    if let Some(d) = &a.volatility_decay {
        let x: Vec<f64> = (0..=spec.analyses.decay_fit_max_lag).map(|l| l as f64).collect();
        let y = x.iter().map(|l| d.amplitude * (-d.rate * l).exp()).collect();
        out.push(("volatility_acf_fit".into(), Curve { x, y, band: None }));
    }
    if let (Some(t), Some(ccdf)) = (&a.tails, &a.positive_ccdf) {
        let hi = ccdf.x.iter().copied().fold(t.power_law.x_min, f64::max);
        let x = linspace_log(t.power_law.x_min, hi.max(t.power_law.x_min * 1.0001), 200);
        let share = t.power_law.n_tail as f64 / t.n_pooled as f64;
        let pl = x.iter().map(|&v| share * t.power_law.ccdf(v)).collect();
        let ex = x.iter().map(|&v| share * t.exponential.ccdf(v)).collect();
        out.push(("powerlaw_fit".into(), Curve { x: x.clone(), y: pl, band: None }));
        out.push(("exponential_fit".into(), Curve { x, y: ex, band: None }));
    }
    if let Some(inv) = &a.inverse {
        for (name, hist) in [("horizon_gain", &inv.gain), ("horizon_loss", &inv.loss)] {
            out.push((
                name.into(),
                Curve {
                    x: hist.keys().map(|&k| k as f64).collect(),
                    y: hist.values().copied().collect(),
                    band: None,
                },
            ));
        }
    }
    out
}

pub fn write_report(report: &StylizedFactReport, path: &Path) -> Result<(), HarnessError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, report).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    writeln!(w).map_err(io_error(path))?;
    w.flush().map_err(io_error(path))
}

pub fn trial_file(dir: &Path, k: usize) -> PathBuf {
    dir.join(TRIALS_DIR).join(format!("trial_{k:04}.csv"))
}

/// Writes the spec, every trial, every diagnostic curve and the report
/// under `dir`. Returns the written paths.
pub fn write_outputs(results: &ExperimentResults, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let mut written = Vec::new();

    let spec_path = dir.join(SPEC_FILE);
    fs::write(&spec_path, results.spec.to_text()).map_err(io_error(&spec_path))?;
    written.push(spec_path);

    for (k, trial) in results.trials.iter().enumerate() {
        let path = trial_file(dir, k);
        write_trial_csv(trial, &path)?;
        written.push(path);
    }
    for (name, curve) in analysis_curves(&results.spec, &results.analysis) {
        let path = dir.join(CURVES_DIR).join(format!("{name}.csv"));
        write_curve_csv(&curve, &path)?;
        written.push(path);
    }
    let report_path = dir.join(REPORT_FILE);
    write_report(&results.report, &report_path)?;
    written.push(report_path);
    Ok(written)
}

/// Re-analyzes a directory produced by [`write_outputs`].
pub fn analyze_directory(dir: &Path) -> Result<(Analysis, StylizedFactReport), HarnessError> {
    let spec_path = dir.join(SPEC_FILE);
    let text = fs::read_to_string(&spec_path).map_err(io_error(&spec_path))?;
    let spec = parse_spec(&text)?;
    let mut trials = Vec::new();
    loop {
        let path = trial_file(dir, trials.len());
        if !path.exists() {
            break;
        }
        trials.push(read_trial_csv(&path)?);
    }
    if trials.is_empty() {
        return Err(HarnessError::Csv {
            path: dir.join(TRIALS_DIR),
            message: "no trial files".into(),
        });
    }
    let analysis = analyze_trials(&spec, &trials)?;
    let report = build_report(&spec, &analysis);
    Ok((analysis, report))
}
