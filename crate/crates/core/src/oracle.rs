//! Brute-force reference implementations used for verification.
//!
//! Nothing here touches binomial coefficients or the incomplete beta
//! function: laws are built by literally running the stopped Bernoulli
//! process over every outcome sequence, and Bayesian integrals are
//! evaluated by adaptive quadrature. These are deliberately naive.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use crate::dist::SnbParams;
use crate::error::{Result, SnbError};

/// Largest `s + t - 1` the enumerators accept.
pub const MAX_ENUMERATION_TRIALS: u64 = 24;

/// An exactly enumerated stopping-time law.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedLaw {
    pub pmf_by_k: BTreeMap<u64, f64>,
    /// Part of `pmf_by_k` absorbed by the success boundary.
    pub success_mass_by_k: BTreeMap<u64, f64>,
    pub success_prob: f64,
    pub mean: f64,
    pub variance: f64,
}

impl EnumeratedLaw {
    fn from_masses(pmf_by_k: BTreeMap<u64, f64>, success_mass_by_k: BTreeMap<u64, f64>) -> Self {
        let success_prob = success_mass_by_k.values().sum();
        let mean: f64 = pmf_by_k.iter().map(|(&k, &m)| k as f64 * m).sum();
        let variance = pmf_by_k.iter().map(|(&k, &m)| (k as f64 - mean).powi(2) * m).sum();
        EnumeratedLaw { pmf_by_k, success_mass_by_k, success_prob, mean, variance }
    }

    pub fn total_mass(&self) -> f64 {
        self.pmf_by_k.values().sum()
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.pmf_by_k.get(&k).copied().unwrap_or(0.0)
    }

    pub fn cdf(&self, k: u64) -> f64 {
        self.pmf_by_k.range(..=k).map(|(_, m)| m).sum()
    }

    /// Smallest enumerated `k` whose cumulative mass reaches `u`.
    pub fn quantile(&self, u: f64) -> u64 {
        let mut acc = 0.0;
        let mut last = 0;
        for (&k, &m) in &self.pmf_by_k {
            acc += m;
            last = k;
            if acc >= u {
                return k;
            }
        }
        last
    }
}

fn check_size(params: &SnbParams) -> Result<()> {
    let n = params.max_trials();
    if n > MAX_ENUMERATION_TRIALS {
        return Err(SnbError::Size { n, max: MAX_ENUMERATION_TRIALS });
    }
    Ok(())
}

/// Enumerates every stopped prefix of the process depth-first over the
/// (trials, responders) lattice and accumulates the exact law.
pub fn enumerate_law(params: &SnbParams) -> Result<EnumeratedLaw> {
    check_size(params)?;
    let (p, q) = (params.p(), 1.0 - params.p());
    let (s, t) = (params.s(), params.t());
    let mut pmf: BTreeMap<u64, f64> = BTreeMap::new();
    let mut success: BTreeMap<u64, f64> = BTreeMap::new();

    // (responders, non-responders, probability of this prefix)
    let mut stack = vec![(0u64, 0u64, 1.0f64)];
    while let Some((yes, no, prob)) = stack.pop() {
        if yes == s || no == t {
            let k = yes + no;
            *pmf.entry(k).or_insert(0.0) += prob;
            if yes == s {
                *success.entry(k).or_insert(0.0) += prob;
            }
            continue;
        }
        stack.push((yes, no + 1, prob * q));
        stack.push((yes + 1, no, prob * p));
    }
    pmf.retain(|_, m| *m > 0.0);
    success.retain(|_, m| *m > 0.0);
    Ok(EnumeratedLaw::from_masses(pmf, success))
}

/// Law of the number of further enrollments given that the first
/// `s_obs + t_obs` outcomes contained `s_obs` responders.
///
/// Runs over every full-length binary outcome string, simulates the process
/// on each, keeps the strings whose opening segment matches the interim
/// counts and renormalizes. This is independent of the reduced-endpoint
/// argument it is used to check.
pub fn enumerate_conditional_law(params: &SnbParams, s_obs: u64, t_obs: u64) -> Result<EnumeratedLaw> {
    check_size(params)?;
    let (s, t) = (params.s(), params.t());
    if s_obs >= s || t_obs >= t {
        return Err(SnbError::TrialStopped(format!(
            "interim counts ({s_obs}, {t_obs}) already reach an endpoint of ({s}, {t})"
        )));
    }
    let n = params.max_trials() as u32;
    let look = (s_obs + t_obs) as u32;
    let (p, q) = (params.p(), 1.0 - params.p());
    let pow_p: Vec<f64> = (0..=n).map(|i| p.powi(i as i32)).collect();
    let pow_q: Vec<f64> = (0..=n).map(|i| q.powi(i as i32)).collect();
    let head_mask: u64 = (1u64 << look) - 1;

    let mut pmf: BTreeMap<u64, f64> = BTreeMap::new();
    let mut success: BTreeMap<u64, f64> = BTreeMap::new();
    let mut event_mass = 0.0;
    for bits in 0u64..(1u64 << n) {
        // bit i is the outcome of trial i + 1
        if (bits & head_mask).count_ones() as u64 != s_obs {
            continue;
        }
        let ones = bits.count_ones();
        let prob = pow_p[ones as usize] * pow_q[(n - ones) as usize];
        if prob == 0.0 {
            continue;
        }
        let (mut yes, mut no, mut stop) = (0u64, 0u64, 0u64);
        for i in 0..n {
            if bits >> i & 1 == 1 {
                yes += 1;
            } else {
                no += 1;
            }
            if yes == s || no == t {
                stop = u64::from(i) + 1;
                break;
            }
        }
        event_mass += prob;
        let remaining = stop - u64::from(look);
        *pmf.entry(remaining).or_insert(0.0) += prob;
        if yes == s {
            *success.entry(remaining).or_insert(0.0) += prob;
        }
    }
    if event_mass == 0.0 {
        return Err(SnbError::domain(format!(
            "interim counts ({s_obs}, {t_obs}) have probability zero at p = {p}"
        )));
    }
    for m in pmf.values_mut().chain(success.values_mut()) {
        *m /= event_mass;
    }
    Ok(EnumeratedLaw::from_masses(pmf, success))
}

/// Writes `k<TAB>probability` lines with 17 significant digits.
pub fn write_fixture<W: Write>(law: &EnumeratedLaw, mut out: W) -> io::Result<()> {
    for (k, m) in &law.pmf_by_k {
        writeln!(out, "{k}\t{m:.16e}")?;
    }
    Ok(())
}

pub fn fixture_string(law: &EnumeratedLaw) -> String {
    let mut s = String::new();
    for (k, m) in &law.pmf_by_k {
        let _ = writeln!(s, "{k}\t{m:.16e}");
    }
    s
}

/// Parses the output of [`write_fixture`]; blank lines and `#` comments are
/// skipped.
pub fn read_fixture(text: &str) -> Result<BTreeMap<u64, f64>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || SnbError::domain(format!("malformed fixture line {}: {line:?}", lineno + 1));
        let mut cols = line.split_whitespace();
        let k = cols.next().and_then(|c| c.parse::<u64>().ok()).ok_or_else(bad)?;
        let m = cols.next().and_then(|c| c.parse::<f64>().ok()).ok_or_else(bad)?;
        if cols.next().is_some() {
            return Err(bad());
        }
        out.insert(k, m);
    }
    Ok(out)
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Cap on the number of panels before quadrature gives up.
const QUAD_MAX_PANELS: usize = 4000;

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = KRONROD_WEIGHTS[7] * f(mid);
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        sum += KRONROD_WEIGHTS[i] * (f(mid - dx) + f(mid + dx));
    }
    sum * half
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    /// |(left + right) - single-panel estimate|
    err: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64) -> Self {
        let mid = 0.5 * (a + b);
        let left = kronrod15(f, a, mid);
        let right = kronrod15(f, mid, b);
        Panel { a, b, left, right, err: (left + right - whole).abs() }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

/// Adaptive quadrature of `f` over `[0, 1]`.
///
/// The interval is mapped through `x = sin^2(pi u / 2)`, which absorbs
/// beta-type endpoint singularities of order `x^(-1/2)`. Stronger
/// singularities still converge, but the error estimate becomes optimistic. Each panel's error
/// is the gap between its 15-point Kronrod estimate and the sum of the
/// estimates on its two halves; the worst panel is bisected until the total
/// gap is within `abs_tol`.
pub fn quadrature<F: Fn(f64) -> f64>(f: F, abs_tol: f64) -> Result<f64> {
    if !(abs_tol > 0.0) {
        return Err(SnbError::domain(format!("abs_tol must be positive, got {abs_tol}")));
    }
    let pi = std::f64::consts::PI;
    let g = |u: f64| {
        let x = (0.5 * pi * u).sin().powi(2);
        // Nodes that round onto an endpoint carry negligible weight.
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        f(x) * 0.5 * pi * (pi * u).sin()
    };
    let mut panels = vec![Panel::new(&g, 0.0, 1.0, kronrod15(&g, 0.0, 1.0))];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        let estimate: f64 = panels.iter().map(Panel::value).sum();
        if !estimate.is_finite() {
            return Err(SnbError::Accuracy { message: "integrand produced a non-finite value".into(), estimate });
        }
        if total_err <= abs_tol {
            return Ok(estimate);
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let panel = panels.swap_remove(worst);
        let mid = 0.5 * (panel.a + panel.b);
        if panels.len() + 2 > QUAD_MAX_PANELS || mid <= panel.a || mid >= panel.b {
            panels.push(panel);
            let estimate = panels.iter().map(Panel::value).sum();
            return Err(SnbError::Accuracy {
                message: format!(
                    "quadrature stalled at error {total_err:e} > abs_tol {abs_tol:e} after {} panels",
                    panels.len()
                ),
                estimate,
            });
        }
        panels.push(Panel::new(&g, panel.a, mid, panel.left));
        panels.push(Panel::new(&g, mid, panel.b, panel.right));
    }
}
