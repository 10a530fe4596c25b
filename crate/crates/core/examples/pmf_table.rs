//! Stopping-time law of a trial that ends at 7 responders or 11
//! non-responders, with response probability 0.2.
//!
//! ```text
//! cargo run --example pmf_table
//! ```

use snb::dist::SnbParams;

fn main() -> snb::Result<()> {
    let trial = SnbParams::new(0.2, 7, 11)?;
    let (lo, hi) = trial.support();
    println!("support: {lo}..={hi}");
    println!("{:>3}  {:>12}  {:>12}  {:>12}  {:>8}", "k", "pmf", "success", "failure", "cdf");
    for k in trial.support_iter() {
        let split = trial.endpoint_split(k);
        println!(
            "{k:>3}  {:>12.6e}  {:>12.6e}  {:>12.6e}  {:>8.5}",
            split.total(),
            split.success_mass,
            split.failure_mass,
            trial.cdf(k)
        );
    }
    let m = trial.moments();
    println!("mean {:.4}, variance {:.4}", m.mean, m.variance);
    println!("median enrollment {}", trial.quantile(0.5)?);
    Ok(())
}
