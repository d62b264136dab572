//! Experiment configuration, multi-trial orchestration, persistence and
//! the stylized-facts report.

mod experiment;
mod figures;
mod output;
mod report;
mod spec;

pub use experiment::{
    analyze_trials, run_experiment, trial_config, Analysis, Curve, ExperimentResults, GarchTrial,
    InverseAnalysis, OrderFlow, TailAnalysis,
};
pub use figures::{figure_spec, reproduce_figure, FIGURES};
pub use output::{
    analysis_curves, analyze_directory, read_curve_csv, read_trial_csv, trial_file,
    write_curve_csv, write_outputs, write_report, write_trial_csv, CURVES_DIR, REPORT_FILE,
    SPEC_FILE, TRIALS_DIR, TRIAL_HEADER,
};
pub use report::{
    build_report, build_report_with, Expectation, FactEntry, StylizedFactReport, Thresholds,
    Verdict, FACT_NAMES,
};
pub use spec::{parse_spec, AnalysisSpec, ExperimentSpec, SpecError};

use std::path::PathBuf;

use thiserror::Error;

use crate::engine::ConfigError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("trial {trial}: {source}")]
    Engine { trial: usize, source: ConfigError },
    #[error("{}{what}: {message}", .trial.map(|k| format!("trial {k}: ")).unwrap_or_default())]
    Analysis {
        trial: Option<usize>,
        what: &'static str,
        message: String,
    },
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", .path.display())]
    Csv { path: PathBuf, message: String },
    #[error("unknown figure {0} (expected 2..=15)")]
    UnknownFigure(u32),
}
