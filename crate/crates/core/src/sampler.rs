//! Simulation of the stopped Bernoulli process.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::dist::SnbParams;
use crate::error::{Result, SnbError};

/// Which absorbing boundary ended a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    SuccessBoundary,
    FailureBoundary,
}

impl Endpoint {
    pub fn as_str(self) -> &'static str {
        match self {
            Endpoint::SuccessBoundary => "success",
            Endpoint::FailureBoundary => "failure",
        }
    }
}

impl std::str::FromStr for Endpoint {
    type Err = SnbError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "success" => Ok(Endpoint::SuccessBoundary),
            "failure" | "futility" => Ok(Endpoint::FailureBoundary),
            other => Err(SnbError::domain(format!(
                "endpoint must be `success` or `failure`, got {other:?}"
            ))),
        }
    }
}

/// One realized path of the trial, from the first enrollment to the stop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectorySample {
    /// `true` is a responder.
    pub outcomes: Vec<bool>,
    pub stopping_time: u64,
    pub responders: u64,
    pub endpoint: Endpoint,
}

impl TrajectorySample {
    /// Classifies a complete outcome sequence; `None` unless the sequence
    /// reaches a boundary exactly at its last element.
    pub fn from_outcomes(params: &SnbParams, outcomes: &[bool]) -> Option<Self> {
        let (mut yes, mut no) = (0u64, 0u64);
        for (i, &o) in outcomes.iter().enumerate() {
            if o {
                yes += 1;
            } else {
                no += 1;
            }
            let hit = yes == params.s() || no == params.t();
            let last = i + 1 == outcomes.len();
            if hit != last {
                return None;
            }
        }
        if outcomes.is_empty() {
            return None;
        }
        let endpoint =
            if yes == params.s() { Endpoint::SuccessBoundary } else { Endpoint::FailureBoundary };
        Some(TrajectorySample {
            outcomes: outcomes.to_vec(),
            stopping_time: outcomes.len() as u64,
            responders: yes,
            endpoint,
        })
    }

    /// Checks every structural invariant of a trajectory against `params`.
    pub fn is_valid_for(&self, params: &SnbParams) -> bool {
        let (lo, hi) = params.support();
        let ones = self.outcomes.iter().filter(|&&o| o).count() as u64;
        let endpoint_ok = match self.endpoint {
            Endpoint::SuccessBoundary => self.responders == params.s(),
            Endpoint::FailureBoundary => self.stopping_time - self.responders == params.t(),
        };
        self.stopping_time == self.outcomes.len() as u64
            && (lo..=hi).contains(&self.stopping_time)
            && ones == self.responders
            && endpoint_ok
            && TrajectorySample::from_outcomes(params, &self.outcomes).as_ref() == Some(self)
    }
}

/// A seeded ChaCha20 stream.
///
/// Streams with the same `(seed, stream)` pair produce identical output;
/// distinct stream indices give independent sequences for parallel work.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl SeededGenerator {
    pub const ALGORITHM: &'static str = "chacha20";

    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SeededGenerator { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn algorithm(&self) -> &'static str {
        Self::ALGORITHM
    }

    /// One Bernoulli(p) draw; exact for p in {0, 1}.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.random::<f64>() < p
    }
}

/// Runs the stopped process once and returns the full trajectory.
pub fn sample_path(params: &SnbParams, gen: &mut SeededGenerator) -> TrajectorySample {
    let (s, t) = (params.s(), params.t());
    let mut outcomes = Vec::with_capacity(params.max_trials() as usize);
    let (mut yes, mut no) = (0u64, 0u64);
    while yes < s && no < t {
        let response = gen.bernoulli(params.p());
        outcomes.push(response);
        if response {
            yes += 1;
        } else {
            no += 1;
        }
    }
    let endpoint = if yes == s { Endpoint::SuccessBoundary } else { Endpoint::FailureBoundary };
    TrajectorySample { stopping_time: outcomes.len() as u64, outcomes, responders: yes, endpoint }
}

pub fn sample_n(params: &SnbParams, n: usize, gen: &mut SeededGenerator) -> Result<Vec<TrajectorySample>> {
    if n == 0 {
        return Err(SnbError::domain("sample count must be at least 1"));
    }
    Ok((0..n).map(|_| sample_path(params, gen)).collect())
}

/// Normalized frequencies of the observed stopping times.
pub fn empirical_pmf(samples: &[TrajectorySample]) -> Result<BTreeMap<u64, f64>> {
    if samples.is_empty() {
        return Err(SnbError::domain("empirical_pmf needs at least one sample"));
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for sample in samples {
        *counts.entry(sample.stopping_time).or_insert(0) += 1;
    }
    let n = samples.len() as f64;
    Ok(counts.into_iter().map(|(k, c)| (k, c as f64 / n)).collect())
}

/// Fraction of samples that ended on the success boundary.
pub fn success_fraction(samples: &[TrajectorySample]) -> f64 {
    let hits = samples.iter().filter(|s| s.endpoint == Endpoint::SuccessBoundary).count();
    hits as f64 / samples.len().max(1) as f64
}

/// Total-variation distance between an empirical law and the exact pmf.
pub fn total_variation(empirical: &BTreeMap<u64, f64>, params: &SnbParams) -> f64 {
    let (lo, hi) = params.support();
    let in_support: f64 = params
        .support_iter()
        .map(|k| (empirical.get(&k).copied().unwrap_or(0.0) - params.pmf(k)).abs())
        .sum();
    let outside: f64 = empirical.range(..lo).chain(empirical.range(hi + 1..)).map(|(_, m)| m).sum();
    0.5 * (in_support + outside)
}
