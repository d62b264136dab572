use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{ConfigError, GameConfig};
use crate::stats::LeadLagSampling;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("{}: `{key}` must be {expected}", location(*.line))]
    Type {
        key: String,
        line: Option<usize>,
        expected: &'static str,
    },
    #[error("{}: `{key}` {message}", location(*.line))]
    OutOfRange {
        key: String,
        line: Option<usize>,
        message: String,
    },
}

fn location(line: Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}"),
        None => "spec".to_string(),
    }
}

/// Diagnostics computed on top of the simulated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSpec {
    pub return_acf_max_lag: usize,
    pub volatility_acf_max_lag: usize,
    /// Lags `decay_fit_min_lag..=decay_fit_max_lag` of the volatility ACF
    /// enter the exponential-decay fit.
    pub decay_fit_min_lag: usize,
    pub decay_fit_max_lag: usize,
    pub kurtosis_scales: Vec<usize>,
    pub volume_scales: Vec<usize>,
    pub lead_lag: LeadLagSampling,
    pub lead_lag_max_lag: usize,
    pub leverage_max_lag: usize,
    pub inverse_theta: f64,
    pub powerlaw: bool,
    pub garch: bool,
    pub inverse_statistics: bool,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            return_acf_max_lag: 100,
            volatility_acf_max_lag: 1000,
            decay_fit_min_lag: 1,
            decay_fit_max_lag: 100,
            kurtosis_scales: (0..9).map(|k| 5 << k).collect(),
            volume_scales: vec![5, 10, 20],
            lead_lag: LeadLagSampling::default(),
            lead_lag_max_lag: 10,
            leverage_max_lag: 50,
            inverse_theta: 0.01,
            powerlaw: true,
            garch: true,
            inverse_statistics: true,
        }
    }
}

/// Everything needed to run and persist one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub game: GameConfig,
    pub trials: usize,
    pub analyses: AnalysisSpec,
    pub output_dir: PathBuf,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            game: GameConfig::default(),
            trials: 10,
            analyses: AnalysisSpec::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

const KEYS: &[&str] = &[
    "n_players",
    "memory",
    "n_strategies",
    "board_lot",
    "cognitive_threshold",
    "initial_price",
    "steps",
    "seed",
    "trials",
    "output_dir",
    "return_acf_max_lag",
    "volatility_acf_max_lag",
    "decay_fit_min_lag",
    "decay_fit_max_lag",
    "kurtosis_scales",
    "volume_scales",
    "lead_lag_dt",
    "lead_lag_n",
    "lead_lag_stride",
    "lead_lag_max_lag",
    "leverage_max_lag",
    "inverse_theta",
    "powerlaw",
    "garch",
    "inverse_statistics",
];

/// 1-based line on which `key` is assigned.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        let rest = l
            .strip_prefix(key)
            .or_else(|| l.strip_prefix(&format!("\"{key}\"")));
        rest.is_some_and(|r| r.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Reader<'a> {
    text: &'a str,
    table: toml::Table,
}

impl Reader<'_> {
    fn type_error(&self, key: &str, expected: &'static str) -> SpecError {
        SpecError::Type {
            key: key.to_string(),
            line: key_line(self.text, key),
            expected,
        }
    }

    fn range_error(&self, key: &str, message: impl Into<String>) -> SpecError {
        SpecError::OutOfRange {
            key: key.to_string(),
            line: key_line(self.text, key),
            message: message.into(),
        }
    }

    fn integer(&self, key: &str, default: i64) -> Result<i64, SpecError> {
        match self.table.get(key) {
            None => Ok(default),
            Some(toml::Value::Integer(i)) => Ok(*i),
            Some(_) => Err(self.type_error(key, "an integer")),
        }
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, SpecError> {
        let v = self.integer(key, default as i64)?;
        usize::try_from(v).map_err(|_| self.range_error(key, format!("= {v} must be non-negative")))
    }

    fn float(&self, key: &str, default: f64) -> Result<f64, SpecError> {
        match self.table.get(key) {
            None => Ok(default),
            Some(toml::Value::Float(f)) => Ok(*f),
            Some(toml::Value::Integer(i)) => Ok(*i as f64),
            Some(_) => Err(self.type_error(key, "a number")),
        }
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool, SpecError> {
        match self.table.get(key) {
            None => Ok(default),
            Some(toml::Value::Boolean(b)) => Ok(*b),
            Some(_) => Err(self.type_error(key, "true or false")),
        }
    }

    fn string(&self, key: &str, default: &str) -> Result<String, SpecError> {
        match self.table.get(key) {
            None => Ok(default.to_string()),
            Some(toml::Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(self.type_error(key, "a string")),
        }
    }

    fn counts(&self, key: &str, default: &[usize]) -> Result<Vec<usize>, SpecError> {
        match self.table.get(key) {
            None => Ok(default.to_vec()),
            Some(toml::Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
                    toml::Value::Integer(i) => {
                        Err(self.range_error(key, format!("contains negative entry {i}")))
                    }
                    _ => Err(self.type_error(key, "an array of integers")),
                })
                .collect(),
            Some(_) => Err(self.type_error(key, "an array of integers")),
        }
    }
}

/// Parses flat `key = value` configuration text. Omitted keys take the
/// baseline defaults; unknown keys are rejected.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec, SpecError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| SpecError::Syntax {
        line: e.span().map_or(1, |s| line_of_offset(text, s.start)),
        message: e.message().to_string(),
    })?;
    if let Some(key) = table.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(SpecError::UnknownKey {
            key: key.clone(),
            line: key_line(text, key).unwrap_or(1),
        });
    }
    let r = Reader { text, table };
    let d = ExperimentSpec::default();
    let da = &d.analyses;

    let seed = r.integer("seed", d.game.seed as i64)?;
    let game = GameConfig {
        n_players: r.count("n_players", d.game.n_players)?,
        memory: r.count("memory", d.game.memory)?,
        n_strategies: r.count("n_strategies", d.game.n_strategies)?,
        board_lot: r.integer("board_lot", d.game.board_lot)?,
        cognitive_threshold: r.float("cognitive_threshold", d.game.cognitive_threshold)?,
        initial_price: r.float("initial_price", d.game.initial_price)?,
        steps: r.count("steps", d.game.steps)?,
        seed: u64::try_from(seed)
            .map_err(|_| r.range_error("seed", format!("= {seed} must be non-negative")))?,
    };
    let analyses = AnalysisSpec {
        return_acf_max_lag: r.count("return_acf_max_lag", da.return_acf_max_lag)?,
        volatility_acf_max_lag: r.count("volatility_acf_max_lag", da.volatility_acf_max_lag)?,
        decay_fit_min_lag: r.count("decay_fit_min_lag", da.decay_fit_min_lag)?,
        decay_fit_max_lag: r.count("decay_fit_max_lag", da.decay_fit_max_lag)?,
        kurtosis_scales: r.counts("kurtosis_scales", &da.kurtosis_scales)?,
        volume_scales: r.counts("volume_scales", &da.volume_scales)?,
        lead_lag: LeadLagSampling {
            dt: r.count("lead_lag_dt", da.lead_lag.dt)?,
            n: r.count("lead_lag_n", da.lead_lag.n)?,
            stride: r.count("lead_lag_stride", da.lead_lag.stride)?,
        },
        lead_lag_max_lag: r.count("lead_lag_max_lag", da.lead_lag_max_lag)?,
        leverage_max_lag: r.count("leverage_max_lag", da.leverage_max_lag)?,
        inverse_theta: r.float("inverse_theta", da.inverse_theta)?,
        powerlaw: r.flag("powerlaw", da.powerlaw)?,
        garch: r.flag("garch", da.garch)?,
        inverse_statistics: r.flag("inverse_statistics", da.inverse_statistics)?,
    };
    let spec = ExperimentSpec {
        game,
        trials: r.count("trials", d.trials)?,
        analyses,
        output_dir: PathBuf::from(r.string("output_dir", "out")?),
    };
    spec.validate().map_err(|e| match e {
        SpecError::OutOfRange { key, message, .. } => {
            let line = key_line(text, &key);
            SpecError::OutOfRange { key, line, message }
        }
        other => other,
    })?;
    Ok(spec)
}

impl ExperimentSpec {
    /// Range checks that do not depend on where the spec came from.
    pub fn validate(&self) -> Result<(), SpecError> {
        let fail = |key: &str, message: String| {
            Err(SpecError::OutOfRange {
                key: key.to_string(),
                line: None,
                message,
            })
        };
        if let Err(ConfigError::OutOfRange { key, message }) = self.game.validate() {
            return fail(key, message);
        }
        if self.game.seed > i64::MAX as u64 {
            return fail("seed", "must be below 2^63".into());
        }
        if self.trials == 0 {
            return fail("trials", "must be at least 1".into());
        }
        let a = &self.analyses;
        for (key, v) in [
            ("return_acf_max_lag", a.return_acf_max_lag),
            ("volatility_acf_max_lag", a.volatility_acf_max_lag),
            ("decay_fit_min_lag", a.decay_fit_min_lag),
            ("lead_lag_dt", a.lead_lag.dt),
            ("lead_lag_n", a.lead_lag.n),
            ("lead_lag_max_lag", a.lead_lag_max_lag),
            ("leverage_max_lag", a.leverage_max_lag),
        ] {
            if v == 0 {
                return fail(key, "must be at least 1".into());
            }
        }
        if a.decay_fit_max_lag < a.decay_fit_min_lag + 1 {
            return fail(
                "decay_fit_max_lag",
                format!("must exceed decay_fit_min_lag = {}", a.decay_fit_min_lag),
            );
        }
        if a.decay_fit_max_lag > a.volatility_acf_max_lag {
            return fail(
                "decay_fit_max_lag",
                format!("must not exceed volatility_acf_max_lag = {}", a.volatility_acf_max_lag),
            );
        }
        for (key, list) in [("kurtosis_scales", &a.kurtosis_scales), ("volume_scales", &a.volume_scales)] {
            if list.is_empty() {
                return fail(key, "must not be empty".into());
            }
            if list.contains(&0) {
                return fail(key, "entries must be at least 1".into());
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return fail(key, "must be strictly increasing".into());
            }
        }
        if a.lead_lag.stride < a.lead_lag.dt * a.lead_lag.n {
            return fail(
                "lead_lag_stride",
                format!(
                    "must cover lead_lag_dt * lead_lag_n = {}",
                    a.lead_lag.dt * a.lead_lag.n
                ),
            );
        }
        if !(a.inverse_theta > 0.0 && a.inverse_theta.is_finite()) {
            return fail("inverse_theta", "must be positive and finite".into());
        }
        Ok(())
    }

    /// Flat `key = value` text that [`parse_spec`] reads back to `self`.
    pub fn to_text(&self) -> String {
        use toml::Value;
        let int = |v: usize| Value::Integer(v as i64).to_string();
        let list = |v: &[usize]| {
            Value::Array(v.iter().map(|&x| Value::Integer(x as i64)).collect()).to_string()
        };
        let g = &self.game;
        let a = &self.analyses;
        let mut s = String::new();
        let mut put = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        put("n_players", int(g.n_players));
        put("memory", int(g.memory));
        put("n_strategies", int(g.n_strategies));
        put("board_lot", Value::Integer(g.board_lot).to_string());
        put("cognitive_threshold", Value::Float(g.cognitive_threshold).to_string());
        put("initial_price", Value::Float(g.initial_price).to_string());
        put("steps", int(g.steps));
        put("seed", Value::Integer(g.seed as i64).to_string());
        put("trials", int(self.trials));
        put(
            "output_dir",
            Value::String(self.output_dir.to_string_lossy().into_owned()).to_string(),
        );
        put("return_acf_max_lag", int(a.return_acf_max_lag));
        put("volatility_acf_max_lag", int(a.volatility_acf_max_lag));
        put("decay_fit_min_lag", int(a.decay_fit_min_lag));
        put("decay_fit_max_lag", int(a.decay_fit_max_lag));
        put("kurtosis_scales", list(&a.kurtosis_scales));
        put("volume_scales", list(&a.volume_scales));
        put("lead_lag_dt", int(a.lead_lag.dt));
        put("lead_lag_n", int(a.lead_lag.n));
        put("lead_lag_stride", int(a.lead_lag.stride));
        put("lead_lag_max_lag", int(a.lead_lag_max_lag));
        put("leverage_max_lag", int(a.leverage_max_lag));
        put("inverse_theta", Value::Float(a.inverse_theta).to_string());
        put("powerlaw", a.powerlaw.to_string());
        put("garch", a.garch.to_string());
        put("inverse_statistics", a.inverse_statistics.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text_is_baseline() {
        let spec = parse_spec("").unwrap();
        assert_eq!(spec, ExperimentSpec::default());
        assert_eq!(
            (spec.game.n_players, spec.game.memory, spec.game.n_strategies, spec.game.board_lot),
            (1000, 5, 2, 9)
        );
        assert_eq!(spec.game.cognitive_threshold, 3.0);
        assert_eq!(spec.game.steps, 50_000);
        assert_eq!(spec.analyses.kurtosis_scales.last(), Some(&1280));
        assert_eq!(spec.analyses.inverse_theta, 0.01);
        assert_eq!(spec.analyses.lead_lag, LeadLagSampling { dt: 10, n: 5, stride: 50 });
    }

    #[test]
    fn board_lot_zero_names_key_and_line() {
        let err = parse_spec("trials = 2\nboard_lot = 0\n").unwrap_err();
        match &err {
            SpecError::OutOfRange { key, line, .. } => {
                assert_eq!(key, "board_lot");
                assert_eq!(*line, Some(2));
            }
            other => panic!("{other:?}"),
        }
        assert!(err.to_string().contains("board_lot"));
    }

    #[test]
    fn unknown_and_mistyped_keys() {
        assert_eq!(
            parse_spec("seed = 1\nboardlot = 3").unwrap_err(),
            SpecError::UnknownKey { key: "boardlot".into(), line: 2 }
        );
        assert!(matches!(
            parse_spec("memory = \"five\"").unwrap_err(),
            SpecError::Type { line: Some(1), .. }
        ));
        assert!(matches!(parse_spec("memory = ").unwrap_err(), SpecError::Syntax { line: 1, .. }));
        assert!(matches!(
            parse_spec("kurtosis_scales = [20, 10]").unwrap_err(),
            SpecError::OutOfRange { .. }
        ));
        assert!(matches!(parse_spec("trials = 0").unwrap_err(), SpecError::OutOfRange { .. }));
        assert!(matches!(parse_spec("seed = -4").unwrap_err(), SpecError::OutOfRange { .. }));
    }

    #[test]
    fn integer_accepted_for_float_keys() {
        let spec = parse_spec("cognitive_threshold = 2\ninverse_theta = 0.02").unwrap();
        assert_eq!(spec.game.cognitive_threshold, 2.0);
        assert_eq!(spec.analyses.inverse_theta, 0.02);
    }

    fn arb_scales() -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::btree_set(1usize..5000, 1..8).prop_map(|s| s.into_iter().collect())
    }

    prop_compose! {
        fn arb_spec()(
            n_players in 1usize..5000,
            memory in 1usize..=6,
            n_strategies in 1usize..5,
            board_lot in 1i64..100,
            c in 0.01f64..50.0,
            p0 in 1e-3f64..1e6,
            steps in 1usize..1_000_000,
            seed in 0u64..=(i64::MAX as u64),
            trials in 1usize..200,
            dir in "[a-zA-Z0-9_./ \"\\\\-]{0,20}",
            (min_lag, span) in (1usize..50, 1usize..50),
            kurtosis_scales in arb_scales(),
            volume_scales in arb_scales(),
            (dt, n, extra) in (1usize..20, 1usize..10, 0usize..30),
            lead_max in 1usize..30,
            lev in 1usize..100,
            theta in 1e-6f64..1.0,
            flags in any::<(bool, bool, bool)>(),
        ) -> ExperimentSpec {
            ExperimentSpec {
                game: GameConfig {
                    n_players, memory, n_strategies, board_lot,
                    cognitive_threshold: c, initial_price: p0, steps, seed,
                },
                trials,
                output_dir: PathBuf::from(dir),
                analyses: AnalysisSpec {
                    return_acf_max_lag: 100,
                    volatility_acf_max_lag: min_lag + span + 10,
                    decay_fit_min_lag: min_lag,
                    decay_fit_max_lag: min_lag + span,
                    kurtosis_scales,
                    volume_scales,
                    lead_lag: LeadLagSampling { dt, n, stride: dt * n + extra },
                    lead_lag_max_lag: lead_max,
                    leverage_max_lag: lev,
                    inverse_theta: theta,
                    powerlaw: flags.0,
                    garch: flags.1,
                    inverse_statistics: flags.2,
                },
            }
        }
    }

    proptest! {
        #[test]
        fn text_round_trip(spec in arb_spec()) {
            let text = spec.to_text();
            let back = parse_spec(&text).unwrap();
            prop_assert_eq!(&back, &spec);
            prop_assert_eq!(back.to_text(), text);
        }
    }
}
