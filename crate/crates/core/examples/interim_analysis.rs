//! Interim look at a running trial: after `s'` responders and `t'`
//! non-responders the remaining enrollment is again stopped negative
//! binomial, with the boundaries reduced.

use snb::dist::SnbParams;
use snb::oracle::enumerate_conditional_law;

fn main() -> snb::Result<()> {
    let trial = SnbParams::new(0.2, 7, 11)?;
    for (s_obs, t_obs) in [(0, 0), (3, 5), (6, 8)] {
        let rest = trial.conditional_remaining(s_obs, t_obs)?;
        let brute = enumerate_conditional_law(&trial, s_obs, t_obs)?;
        println!(
            "after {s_obs} responders / {t_obs} non-responders: SNB(0.2, {}, {}), P[success] = {:.6}",
            rest.s(),
            rest.t(),
            rest.success_probability()
        );
        for k in rest.support_iter() {
            println!("  {:>2} more -> {:.8} (enumerated {:.8})", k, rest.pmf(k), brute.pmf(k));
        }
    }
    Ok(())
}
