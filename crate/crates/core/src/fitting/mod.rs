//! Maximum-likelihood estimators: continuous power-law and exponential
//! tails, Vuong's closeness test, and Gaussian GARCH(1,1).

mod garch;
mod powerlaw;
mod simplex;
mod vuong;

pub use garch::{
    fit_garch11, garch_log_likelihood, garch_residuals, garch_variances, GarchFit, GarchParams,
};
pub use powerlaw::{
    fit_exponential_tail, fit_powerlaw_tail, fit_powerlaw_tail_with, ExponentialFit,
    PowerLawFit, PowerLawOptions,
};
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};
pub use vuong::{vuong_compare, vuong_test, Favored, VuongResult, VUONG_SIGNIFICANCE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("too few samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate sample: {0}")]
    Degenerate(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
