//! Seeded trial simulation compared against the exact law.

use snb::dist::SnbParams;
use snb::sampler::{self, SeededGenerator};

fn main() -> snb::Result<()> {
    let trial = SnbParams::new(0.2, 7, 11)?;
    let mut gen = SeededGenerator::new(42);

    let first = sampler::sample_path(&trial, &mut gen);
    let path: String = first.outcomes.iter().map(|&o| if o { '1' } else { '0' }).collect();
    println!("one trial: {path} -> {} at enrollment {}", first.endpoint.as_str(), first.stopping_time);

    let samples = sampler::sample_n(&trial, 100_000, &mut gen)?;
    let empirical = sampler::empirical_pmf(&samples)?;
    println!("{:>3}  {:>9}  {:>9}", "k", "simulated", "exact");
    for k in trial.support_iter() {
        println!("{k:>3}  {:>9.5}  {:>9.5}", empirical.get(&k).copied().unwrap_or(0.0), trial.pmf(k));
    }
    println!("total variation {:.5}", sampler::total_variation(&empirical, &trial));
    println!(
        "success fraction {:.5} (exact {:.5}), generator {} seed {}",
        sampler::success_fraction(&samples),
        trial.success_probability(),
        gen.algorithm(),
        gen.seed()
    );
    Ok(())
}
