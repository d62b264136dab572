use super::simplex::{nelder_mead, SimplexOptions};
use super::FitError;

/// Fewest observations accepted by [`fit_garch11`].
pub const MIN_OBSERVATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchParams {
    pub a0: f64,
    pub a1: f64,
    pub b1: f64,
}

impl GarchParams {
    /// Unconditional variance `a0 / (1 - a1 - b1)`.
    pub fn unconditional_variance(&self) -> f64 {
        self.a0 / (1.0 - self.a1 - self.b1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchFit {
    pub params: GarchParams,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn sample_variance(r: &[f64]) -> f64 {
    let n = r.len() as f64;
    let m = r.iter().sum::<f64>() / n;
    r.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n
}

/// Conditional variances `s2[t] = a0 + a1 r[t-1]^2 + b1 s2[t-1]`, started
/// from the sample variance.
pub fn garch_variances(returns: &[f64], params: &GarchParams) -> Vec<f64> {
    let mut out = Vec::with_capacity(returns.len());
    if returns.is_empty() {
        return out;
    }
    let mut s2 = sample_variance(returns);
    out.push(s2);
    for r in &returns[..returns.len() - 1] {
        s2 = params.a0 + params.a1 * r * r + params.b1 * s2;
        out.push(s2);
    }
    out
}

/// Gaussian log-likelihood of `returns` under the GARCH(1,1) recursion.
pub fn garch_log_likelihood(returns: &[f64], params: &GarchParams) -> f64 {
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    garch_variances(returns, params)
        .iter()
        .zip(returns)
        .map(|(s2, r)| -0.5 * (ln_2pi + s2.ln() + r * r / s2))
        .sum()
}

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Maps unconstrained `(ln a0, u, v)` to parameters with `a0 > 0`,
/// `a1, b1 > 0` and `a1 + b1 < 1`: persistence `logistic(u)` is split
/// between `a1` and `b1` by the share `logistic(v)`.
fn from_unconstrained(z: &[f64]) -> GarchParams {
    let persistence = logistic(z[1]);
    let share = logistic(z[2]);
    GarchParams {
        a0: z[0].exp(),
        a1: persistence * share,
        b1: persistence * (1.0 - share),
    }
}

fn to_unconstrained(p: &GarchParams) -> Vec<f64> {
    let persistence = p.a1 + p.b1;
    vec![p.a0.ln(), logit(persistence), logit(p.a1 / persistence)]
}

/// Maximum-likelihood GARCH(1,1) with Gaussian innovations.
///
/// Nelder-Mead in the unconstrained space from `a1 = 0.05, b1 = 0.90`,
/// `a0 = var (1 - a1 - b1)`, restarted from its own optimum until a restart
/// no longer improves the likelihood.
pub fn fit_garch11(returns: &[f64]) -> Result<GarchFit, FitError> {
    if returns.len() < MIN_OBSERVATIONS {
        return Err(FitError::TooFewSamples {
            needed: MIN_OBSERVATIONS,
            got: returns.len(),
        });
    }
    if returns.iter().any(|r| !r.is_finite()) {
        return Err(FitError::InvalidInput("non-finite return".into()));
    }
    let var = sample_variance(returns);
    let mean_square = returns.iter().map(|r| r * r).sum::<f64>() / returns.len() as f64;
    // Constant input leaves only rounding noise in the variance.
    if !(var > 1e-12 * mean_square) {
        return Err(FitError::Degenerate("returns have zero variance".into()));
    }
    let init = GarchParams {
        a0: var * 0.05,
        a1: 0.05,
        b1: 0.90,
    };
    let objective = |z: &[f64]| -garch_log_likelihood(returns, &from_unconstrained(z));
    let options = SimplexOptions::default();

    let mut z = to_unconstrained(&init);
    let mut best = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..5 {
        let r = nelder_mead(objective, &z, options);
        iterations += r.iterations;
        converged = r.converged;
        let improved = best - r.value > 1e-9 * best.abs().max(1.0);
        z = r.x;
        best = best.min(r.value);
        if !improved || !converged {
            break;
        }
    }
    let params = from_unconstrained(&z);
    Ok(GarchFit {
        params,
        log_likelihood: garch_log_likelihood(returns, &params),
        converged,
        iterations,
    })
}

/// Standardized residuals `r[t] / s[t]`.
pub fn garch_residuals(returns: &[f64], params: &GarchParams) -> Result<Vec<f64>, FitError> {
    garch_variances(returns, params)
        .iter()
        .zip(returns)
        .map(|(s2, r)| {
            if *s2 > 0.0 {
                Ok(r / s2.sqrt())
            } else {
                Err(FitError::Degenerate(format!("conditional variance {s2}")))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn simulate(p: GarchParams, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s2 = p.unconditional_variance();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n + 1000 {
            let z: f64 = StandardNormal.sample(&mut rng);
            let r = s2.sqrt() * z;
            out.push(r);
            s2 = p.a0 + p.a1 * r * r + p.b1 * s2;
        }
        out.split_off(1000)
    }

    #[test]
    fn recovers_simulated_parameters() {
        let truth = GarchParams { a0: 1e-5, a1: 0.10, b1: 0.85 };
        let r = simulate(truth, 50_000, 21);
        let fit = fit_garch11(&r).unwrap();
        assert!(fit.converged);
        assert!((fit.params.a1 - 0.10).abs() < 0.05, "{fit:?}");
        assert!((fit.params.b1 - 0.85).abs() < 0.05, "{fit:?}");
        let resid = garch_residuals(&r, &fit.params).unwrap();
        let v = sample_variance(&resid);
        assert!((0.95..=1.05).contains(&v), "residual variance {v}");
    }

    #[test]
    fn white_noise_matches_unconditional_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let v: f64 = 4e-4;
        let r: Vec<f64> = (0..20_000)
            .map(|_| v.sqrt() * Distribution::<f64>::sample(&StandardNormal, &mut rng))
            .collect();
        let fit = fit_garch11(&r).unwrap();
        let uv = fit.params.unconditional_variance();
        assert!((uv / v - 1.0).abs() < 0.05, "{fit:?} uv={uv}");
        let resid = garch_residuals(&r, &fit.params).unwrap();
        assert!((0.95..=1.05).contains(&sample_variance(&resid)));
    }

    #[test]
    fn zero_arch_terms_give_constant_variance() {
        let r: Vec<f64> = (0..50).map(|i| ((i * 13) % 7) as f64 - 3.0).collect();
        let v = sample_variance(&r);
        let p = GarchParams { a0: v, a1: 0.0, b1: 0.0 };
        let s2 = garch_variances(&r, &p);
        assert!(s2.iter().all(|&s| s == v));
        let resid = garch_residuals(&r, &p).unwrap();
        for (e, x) in resid.iter().zip(&r) {
            assert_eq!(*e, x / v.sqrt());
        }
        let n = r.len() as f64;
        let iid: f64 = r.iter().map(|x| -0.5 * ((2.0 * std::f64::consts::PI * v).ln() + x * x / v)).sum();
        assert!((garch_log_likelihood(&r, &p) - iid).abs() < 1e-9 * n);
    }

    #[test]
    fn variance_floor() {
        let truth = GarchParams { a0: 2e-6, a1: 0.2, b1: 0.7 };
        let r = simulate(truth, 2000, 5);
        assert!(garch_variances(&r, &truth)[1..].iter().all(|&s| s >= truth.a0));
    }

    #[test]
    fn transform_round_trip() {
        let p = GarchParams { a0: 3e-6, a1: 0.07, b1: 0.9 };
        let q = from_unconstrained(&to_unconstrained(&p));
        assert!((p.a0 - q.a0).abs() < 1e-18 && (p.a1 - q.a1).abs() < 1e-12 && (p.b1 - q.b1).abs() < 1e-12);
    }

    #[test]
    fn rejects_short_or_flat_input() {
        assert!(matches!(fit_garch11(&[0.1; 100]), Err(FitError::TooFewSamples { .. })));
        assert!(matches!(fit_garch11(&[0.1; 600]), Err(FitError::Degenerate(_))));
    }
}
