//! Bayesian view of the trial: prior predictive enrollment, posterior of the
//! response rate once the trial has stopped, and the predicted chance of
//! success mid-trial.

use snb::bayes::{self, BetaPrior};
use snb::sampler::Endpoint;

fn main() -> snb::Result<()> {
    let prior = BetaPrior::jeffreys();
    let (s, t) = (7, 11);

    println!("prior predictive enrollment:");
    for k in s.min(t)..=s + t - 1 {
        println!("  k={k:>2}: {:.6}", bayes::predictive_pmf(&prior, s, t, k)?);
    }

    let k = 15;
    let mix = bayes::posterior(&prior, s, t, k)?;
    println!("posterior given only k={k}:");
    if let Some(c) = mix.component_success {
        println!("  {:.4} x Beta({}, {})", mix.weight_success, c.a, c.b);
    }
    if let Some(c) = mix.component_failure {
        println!("  {:.4} x Beta({}, {})", mix.weight_failure, c.a, c.b);
    }
    let post = bayes::posterior_given_endpoint(&prior, s, t, k, Endpoint::SuccessBoundary)?;
    println!("posterior given success at k={k}: Beta({}, {}), mean {:.4}", post.a, post.b, post.mean());

    for (s_obs, t_obs) in [(0, 0), (3, 5), (6, 8)] {
        let p = bayes::predicted_success_probability(&prior, s, t, s_obs, t_obs)?;
        println!("at ({s_obs}, {t_obs}): predicted P[success] = {p:.4}");
    }
    Ok(())
}
