//! The chance of declaring success equals a binomial upper tail: stopping
//! at `s` responders happens exactly when `s + t - 1` patients would have
//! produced at least `s` responses.

use snb::dist::SnbParams;
use snb::special::log_choose;

fn main() -> snb::Result<()> {
    for (p, s, t) in [(0.2, 7, 11), (0.5, 3, 3), (0.35, 5, 9)] {
        let d = SnbParams::new(p, s, t)?;
        let n = d.max_trials();
        let mut tail = 0.0;
        for j in s..=n {
            tail += (log_choose(n, j)? + j as f64 * p.ln() + (n - j) as f64 * (1.0 - p).ln()).exp();
        }
        println!(
            "p={p} s={s} t={t}: P[stop on success] = {:.15}, P[Bin({n}, {p}) >= {s}] = {tail:.15}",
            d.success_probability()
        );
    }
    Ok(())
}
