//! Table builders behind the `snb` subcommands and the service's stateless
//! endpoints.

use crate::bayes::{self, BetaPrior};
use crate::dist::SnbParams;
use crate::error::{Result, SnbError};
use crate::oracle;
use crate::sampler::{self, Endpoint, SeededGenerator};
use crate::table::{Cell, OutputTable};

/// Largest pointwise deviation `oracle-check` tolerates.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

/// Parses `start:end:step` into an inclusive, evenly spaced grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| SnbError::domain(format!("grid {spec:?} must be start:end:step ({why})"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected three fields"));
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad("non-numeric field")))
        .collect::<Result<Vec<_>>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !(start.is_finite() && end.is_finite() && step.is_finite()) {
        return Err(bad("non-finite field"));
    }
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if end < start {
        return Err(bad("end before start"));
    }
    let span = (end - start) / step;
    let steps = if (span - span.round()).abs() < 1e-9 { span.round() } else { span.floor() };
    if steps > 1e7 {
        return Err(bad("too many grid points"));
    }
    let steps = steps as u64;
    let last = start + steps as f64 * step;
    Ok((0..=steps)
        .map(|i| {
            if i == steps && (last - end).abs() < 1e-9 * step {
                end
            } else {
                start + (last - start) * i as f64 / steps.max(1) as f64
            }
        })
        .collect())
}

pub fn pmf_table(params: &SnbParams) -> OutputTable {
    let mut table = OutputTable::new(["k", "pmf", "success_mass", "failure_mass", "cdf"]);
    for k in params.support_iter() {
        let split = params.endpoint_split(k);
        table.push_row(vec![
            k.into(),
            split.total().into(),
            split.success_mass.into(),
            split.failure_mass.into(),
            params.cdf(k).into(),
        ]);
    }
    table
}

pub fn moments_table(s: u64, t: u64, grid: &[f64]) -> Result<OutputTable> {
    let mut table = OutputTable::new(["p", "mean", "variance"]);
    for &p in grid {
        let m = SnbParams::new(p, s, t)?.moments();
        table.push_row(vec![p.into(), m.mean.into(), m.variance.into()]);
    }
    Ok(table)
}

/// Designs `(s, t)` with at most `max_n` enrollments whose probability of
/// declaring success at `p0` is at most `alpha_level`, cheapest expected
/// enrollment first.
pub fn design_table(p0: f64, alpha_level: f64, max_n: u64) -> Result<OutputTable> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(SnbError::domain(format!("p0 must lie in (0, 1), got {p0}")));
    }
    if !(alpha_level > 0.0 && alpha_level < 1.0) {
        return Err(SnbError::domain(format!("alpha level must lie in (0, 1), got {alpha_level}")));
    }
    if max_n == 0 {
        return Err(SnbError::domain("max-n must be at least 1"));
    }
    struct Row {
        s: u64,
        t: u64,
        type_one: f64,
        expected: f64,
    }
    let mut rows = Vec::new();
    for s in 1..=max_n {
        for t in 1..=(max_n + 1 - s) {
            let d = SnbParams::new(p0, s, t)?;
            let type_one = d.success_probability();
            if type_one <= alpha_level {
                rows.push(Row { s, t, type_one, expected: d.moments().mean });
            }
        }
    }
    rows.sort_by(|a, b| {
        a.expected
            .total_cmp(&b.expected)
            .then((a.s + a.t).cmp(&(b.s + b.t)))
            .then(a.s.cmp(&b.s))
    });
    let mut table = OutputTable::new(["s", "t", "n", "type_one_mass", "expected_enrollment"]);
    for r in rows {
        table.push_row(vec![r.s.into(), r.t.into(), (r.s + r.t - 1).into(), r.type_one.into(), r.expected.into()]);
    }
    Ok(table)
}

pub fn posterior_table(
    prior: &BetaPrior,
    s: u64,
    t: u64,
    k: u64,
    endpoint: Option<Endpoint>,
) -> Result<OutputTable> {
    let mut table = OutputTable::new(["component", "weight", "a", "b", "mean"]);
    match endpoint {
        Some(e) => {
            let c = bayes::posterior_given_endpoint(prior, s, t, k, e)?;
            table.push_row(vec![e.as_str().into(), 1.0.into(), c.a.into(), c.b.into(), c.mean().into()]);
        }
        None => {
            let m = bayes::posterior(prior, s, t, k)?;
            let parts = [
                ("success", m.weight_success, m.component_success),
                ("failure", m.weight_failure, m.component_failure),
            ];
            for (name, w, c) in parts {
                if let Some(c) = c {
                    table.push_row(vec![name.into(), w.into(), c.a.into(), c.b.into(), c.mean().into()]);
                }
            }
        }
    }
    Ok(table)
}

pub fn predictive_table(prior: &BetaPrior, s: u64, t: u64) -> Result<OutputTable> {
    let shape = SnbParams::new(0.5, s, t)?;
    let mut table = OutputTable::new(["k", "predictive_pmf", "success_term", "failure_term"]);
    for k in shape.support_iter() {
        let (succ, fail) = bayes::predictive_terms(prior, s, t, k)?;
        table.push_row(vec![k.into(), (succ + fail).into(), succ.into(), fail.into()]);
    }
    Ok(table)
}

pub fn simulate_table(params: &SnbParams, n: usize, seed: u64) -> Result<OutputTable> {
    let mut gen = SeededGenerator::new(seed);
    let samples = sampler::sample_n(params, n, &mut gen)?;
    let mut table = OutputTable::new(["sample", "stopping_time", "responders", "endpoint", "outcomes"])
        .with_meta("generator", gen.algorithm())
        .with_meta("seed", seed)
        .with_meta("stream", gen.stream());
    for (i, sample) in samples.iter().enumerate() {
        let path: String = sample.outcomes.iter().map(|&o| if o { '1' } else { '0' }).collect();
        table.push_row(vec![
            i.into(),
            sample.stopping_time.into(),
            sample.responders.into(),
            sample.endpoint.as_str().into(),
            Cell::Text(path),
        ]);
    }
    Ok(table)
}

/// Closed form against exhaustive enumeration; returns the table and the
/// largest absolute deviation seen.
pub fn oracle_check_table(params: &SnbParams) -> Result<(OutputTable, f64)> {
    let law = oracle::enumerate_law(params)?;
    let mut table = OutputTable::new(["k", "closed_form", "enumerated", "success_closed", "success_enumerated", "abs_diff"]);
    let mut worst: f64 = 0.0;
    for k in params.support_iter() {
        let split = params.endpoint_split(k);
        let enumerated = law.pmf(k);
        let enumerated_success = law.success_mass_by_k.get(&k).copied().unwrap_or(0.0);
        let diff = (split.total() - enumerated).abs().max((split.success_mass - enumerated_success).abs());
        worst = worst.max(diff);
        table.push_row(vec![
            k.into(),
            split.total().into(),
            enumerated.into(),
            split.success_mass.into(),
            enumerated_success.into(),
            diff.into(),
        ]);
    }
    let success_diff = (params.success_probability() - law.success_prob).abs();
    worst = worst.max(success_diff);
    let verdict = if worst <= ORACLE_TOLERANCE { "pass" } else { "fail" };
    let table = table
        .with_meta("max_deviation", crate::table::format_real(worst))
        .with_meta("tolerance", crate::table::format_real(ORACLE_TOLERANCE))
        .with_meta("result", verdict);
    Ok((table, worst))
}
