//! Beta-prior inference for the response probability.
//!
//! With `P ~ Beta(alpha, beta)` the stopping time has a closed-form
//! predictive law, and the posterior of `P` after observing only the
//! stopping time `k` is a two-component beta mixture: one component for
//! each boundary that could have ended the trial. Knowing which boundary
//! was reached collapses the mixture to a single conjugate beta.

use serde::{Deserialize, Serialize};

use crate::dist::SnbParams;
use crate::error::{Result, SnbError};
use crate::sampler::Endpoint;
use crate::special::{ln_beta_unchecked, ln_choose_unchecked};

/// `Beta(alpha, beta)` prior on the response probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaPrior {
    alpha: f64,
    beta: f64,
}

/// A beta distribution `Beta(a, b)` appearing in a posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaDist {
    pub a: f64,
    pub b: f64,
}

/// Posterior of `P` given only the stopping time `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorMixture {
    pub weight_success: f64,
    /// `Beta(alpha + s, beta + k - s)`; absent when `k < s`.
    pub component_success: Option<BetaDist>,
    pub weight_failure: f64,
    /// `Beta(alpha + k - t, beta + t)`; absent when `k < t`.
    pub component_failure: Option<BetaDist>,
}

/// `e * ln(x)` with `0 * ln(0) = 0`.
fn xlny(e: f64, x: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e * x.ln()
    }
}

impl BetaPrior {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(SnbError::domain(format!(
                "beta prior needs finite alpha > 0 and beta > 0, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(BetaPrior { alpha, beta })
    }

    pub fn jeffreys() -> Self {
        BetaPrior { alpha: 0.5, beta: 0.5 }
    }

    pub fn uniform() -> Self {
        BetaPrior { alpha: 1.0, beta: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Conjugate update after `responders` successes and `non_responders`
    /// failures.
    pub fn updated(&self, responders: u64, non_responders: u64) -> BetaPrior {
        BetaPrior { alpha: self.alpha + responders as f64, beta: self.beta + non_responders as f64 }
    }

    pub fn as_dist(&self) -> BetaDist {
        BetaDist { a: self.alpha, b: self.beta }
    }

    pub fn density(&self, p: f64) -> f64 {
        self.as_dist().density(p)
    }
}

impl BetaDist {
    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    pub fn variance(&self) -> f64 {
        let n = self.a + self.b;
        self.a * self.b / (n * n * (n + 1.0))
    }

    pub fn ln_density(&self, p: f64) -> f64 {
        if !(0.0..=1.0).contains(&p) {
            return f64::NEG_INFINITY;
        }
        xlny(self.a - 1.0, p) + xlny(self.b - 1.0, 1.0 - p) - ln_beta_unchecked(self.a, self.b)
    }

    pub fn density(&self, p: f64) -> f64 {
        self.ln_density(p).exp()
    }
}

impl PosteriorMixture {
    pub fn density(&self, p: f64) -> f64 {
        let part = |w: f64, c: Option<BetaDist>| match c {
            Some(c) if w > 0.0 => w * c.density(p),
            _ => 0.0,
        };
        part(self.weight_success, self.component_success)
            + part(self.weight_failure, self.component_failure)
    }

    pub fn mean(&self) -> f64 {
        let part = |w: f64, c: Option<BetaDist>| c.map_or(0.0, |c| w * c.mean());
        part(self.weight_success, self.component_success)
            + part(self.weight_failure, self.component_failure)
    }
}

fn check_shape(s: u64, t: u64) -> Result<()> {
    if s == 0 || t == 0 {
        return Err(SnbError::domain(format!(
            "endpoints must be positive integers, got s={s}, t={t}"
        )));
    }
    Ok(())
}

fn check_support(s: u64, t: u64, k: u64) -> Result<()> {
    check_shape(s, t)?;
    let (lo, hi) = (s.min(t), s + t - 1);
    if !(lo..=hi).contains(&k) {
        return Err(SnbError::domain(format!(
            "k={k} lies outside the support [{lo}, {hi}] for s={s}, t={t}"
        )));
    }
    Ok(())
}

/// Joint density of `(P = p, Y = k)`: the beta prior density times the
/// pmf at `k`.
pub fn prior_times_likelihood(prior: &BetaPrior, s: u64, t: u64, k: u64, p: f64) -> Result<f64> {
    check_support(s, t, k)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(SnbError::domain(format!("p must lie in [0, 1], got {p}")));
    }
    let (a, b) = (prior.alpha, prior.beta);
    let ln_norm = ln_beta_unchecked(a, b);
    let (kf, sf, tf) = (k as f64, s as f64, t as f64);
    let mut total = 0.0;
    if k >= s {
        let ln = ln_choose_unchecked(k - 1, s - 1) - ln_norm
            + xlny(a + sf - 1.0, p)
            + xlny(kf + b - sf - 1.0, 1.0 - p);
        total += ln.exp();
    }
    if k >= t {
        let ln = ln_choose_unchecked(k - 1, t - 1) - ln_norm
            + xlny(kf + a - tf - 1.0, p)
            + xlny(b + tf - 1.0, 1.0 - p);
        total += ln.exp();
    }
    Ok(total)
}

/// The success and failure summands of the predictive pmf at `k`.
pub fn predictive_terms(prior: &BetaPrior, s: u64, t: u64, k: u64) -> Result<(f64, f64)> {
    check_shape(s, t)?;
    let (a, b) = (prior.alpha, prior.beta);
    if k > s + t - 1 {
        return Ok((0.0, 0.0));
    }
    let ln_norm = ln_beta_unchecked(a, b);
    let kf = k as f64;
    let success = if k >= s {
        let r = (k - s) as f64;
        (ln_choose_unchecked(k - 1, s - 1) + ln_beta_unchecked(a + s as f64, r + b) - ln_norm).exp()
    } else {
        0.0
    };
    let failure = if k >= t {
        let r = kf - t as f64;
        (ln_choose_unchecked(k - 1, t - 1) + ln_beta_unchecked(a + r, t as f64 + b) - ln_norm).exp()
    } else {
        0.0
    };
    Ok((success, failure))
}

/// Marginal law of the stopping time with `p` integrated against the prior.
pub fn predictive_pmf(prior: &BetaPrior, s: u64, t: u64, k: u64) -> Result<f64> {
    let (success, failure) = predictive_terms(prior, s, t, k)?;
    Ok(success + failure)
}

/// The predictive pmf written as a mixture of hypergeometric-type
/// probabilities; only defined for integer prior parameters.
pub fn predictive_pmf_hypergeometric(prior: &BetaPrior, s: u64, t: u64, k: u64) -> Result<f64> {
    let (a, b) = (prior.alpha, prior.beta);
    if a.fract() != 0.0 || b.fract() != 0.0 {
        return Err(SnbError::domain(format!(
            "hypergeometric form needs integer alpha and beta, got alpha={a}, beta={b}"
        )));
    }
    check_shape(s, t)?;
    if k > s + t - 1 {
        return Ok(0.0);
    }
    let (ai, bi) = (a as u64, b as u64);
    let pool = ai + bi + k - 1;
    let mut total = 0.0;
    if k >= s {
        let ln = ln_choose_unchecked(k - 1, s - 1) + ln_choose_unchecked(ai + bi, ai)
            - ln_choose_unchecked(pool, ai + s - 1);
        total += ln.exp() * (a / (a + b)) * (b / ((k - s) as f64 + b));
    }
    if k >= t {
        let ln = ln_choose_unchecked(k - 1, t - 1) + ln_choose_unchecked(ai + bi, bi)
            - ln_choose_unchecked(pool, bi + t - 1);
        total += ln.exp() * (b / (a + b)) * (a / ((k - t) as f64 + a));
    }
    Ok(total)
}

/// Posterior of `P` given that the trial stopped at `k`, boundary unknown.
pub fn posterior(prior: &BetaPrior, s: u64, t: u64, k: u64) -> Result<PosteriorMixture> {
    check_support(s, t, k)?;
    let (success, failure) = predictive_terms(prior, s, t, k)?;
    let total = success + failure;
    let (a, b) = (prior.alpha, prior.beta);
    let component_success =
        (k >= s).then(|| BetaDist { a: a + s as f64, b: b + (k - s) as f64 });
    let component_failure =
        (k >= t).then(|| BetaDist { a: a + (k - t) as f64, b: b + t as f64 });
    // Exact zeros for dead indicators; the live weight is then exactly one.
    let (weight_success, weight_failure) = match (k >= s, k >= t) {
        (true, false) => (1.0, 0.0),
        (false, true) => (0.0, 1.0),
        _ => (success / total, failure / total),
    };
    Ok(PosteriorMixture { weight_success, component_success, weight_failure, component_failure })
}

/// Posterior of `P` when both the stopping time and the boundary reached
/// are known.
pub fn posterior_given_endpoint(
    prior: &BetaPrior,
    s: u64,
    t: u64,
    k: u64,
    endpoint: Endpoint,
) -> Result<BetaDist> {
    check_shape(s, t)?;
    let hi = s + t - 1;
    let (a, b) = (prior.alpha, prior.beta);
    match endpoint {
        Endpoint::SuccessBoundary if (s..=hi).contains(&k) => {
            Ok(BetaDist { a: a + s as f64, b: b + (k - s) as f64 })
        }
        Endpoint::FailureBoundary if (t..=hi).contains(&k) => {
            Ok(BetaDist { a: a + (k - t) as f64, b: b + t as f64 })
        }
        _ => Err(SnbError::domain(format!(
            "a trial with s={s}, t={t} cannot stop on the {} boundary at k={k}",
            endpoint.as_str()
        ))),
    }
}

/// Probability that a trial currently at `(s_obs, t_obs)` eventually stops
/// on the success boundary, averaged over the current posterior of `P`.
pub fn predicted_success_probability(
    prior: &BetaPrior,
    s: u64,
    t: u64,
    s_obs: u64,
    t_obs: u64,
) -> Result<f64> {
    check_shape(s, t)?;
    if s_obs >= s || t_obs >= t {
        return Err(SnbError::TrialStopped(format!(
            "interim counts ({s_obs}, {t_obs}) already reach an endpoint of ({s}, {t})"
        )));
    }
    let current = prior.updated(s_obs, t_obs);
    let (s_rem, t_rem) = (s - s_obs, t - t_obs);
    let mut total = 0.0;
    for k in s_rem..=s_rem + t_rem - 1 {
        total += predictive_terms(&current, s_rem, t_rem, k)?.0;
    }
    Ok(total.min(1.0))
}

/// Predictive law of the remaining enrollments from an interim state, as
/// `(k, probability)` pairs over the reduced support.
pub fn predictive_remaining(
    prior: &BetaPrior,
    s: u64,
    t: u64,
    s_obs: u64,
    t_obs: u64,
) -> Result<Vec<(u64, f64)>> {
    let reduced = SnbParams::new(0.5, s, t)?.conditional_remaining(s_obs, t_obs)?;
    let current = prior.updated(s_obs, t_obs);
    reduced
        .support_iter()
        .map(|k| Ok((k, predictive_pmf(&current, reduced.s(), reduced.t(), k)?)))
        .collect()
}
