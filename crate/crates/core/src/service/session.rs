//! Trial sessions: a design, a model for `p`, and an ordered outcome log.
//!
//! All derived state (counts, status, reports) is a pure function of the
//! log, so replaying the log reproduces the session exactly.

use serde::{Deserialize, Serialize};

use crate::bayes::{self, BetaDist, BetaPrior};
use crate::dist::SnbParams;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseModel {
    /// Known response probability.
    Fixed { p: f64 },
    /// Beta prior on the response probability.
    Beta { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ongoing,
    StoppedSuccess,
    StoppedFutility,
}

impl TrialStatus {
    pub fn is_stopped(self) -> bool {
        self != TrialStatus::Ongoing
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("{0}")]
    Invalid(String),
    #[error("trial {id} not found")]
    NotFound { id: String },
    #[error("{0}")]
    Conflict(String),
    #[error("event log: {0}")]
    Storage(String),
}

impl From<crate::SnbError> for SessionError {
    fn from(e: crate::SnbError) -> Self {
        SessionError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfPoint {
    pub k: u64,
    pub probability: f64,
}

/// Law of the enrollments still to come from the current interim state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainingLaw {
    pub s: u64,
    pub t: u64,
    pub support: [u64; 2],
    pub pmf: Vec<PmfPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PosteriorSummary {
    Point { p: f64 },
    Beta { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterimReport {
    pub id: String,
    pub created_at: u64,
    pub s: u64,
    pub t: u64,
    pub model: ResponseModel,
    pub status: TrialStatus,
    pub s_obs: u64,
    pub t_obs: u64,
    pub enrolled: u64,
    pub outcomes: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remaining: Option<RemainingLaw>,
    pub posterior: PosteriorSummary,
    pub predicted_success_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub p: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorView {
    pub id: String,
    pub posterior: PosteriorSummary,
    pub components: Vec<MixtureComponent>,
    pub density: Vec<DensityPoint>,
}

/// Number of density samples in a [`PosteriorView`].
pub const POSTERIOR_GRID: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSession {
    id: String,
    created_at: u64,
    s: u64,
    t: u64,
    model: ResponseModel,
    outcomes: Vec<bool>,
}

impl TrialSession {
    pub fn new(id: String, created_at: u64, s: u64, t: u64, model: ResponseModel) -> Result<Self, SessionError> {
        // Validation goes through the same constructors as the library.
        match model {
            ResponseModel::Fixed { p } => {
                SnbParams::new(p, s, t)?;
            }
            ResponseModel::Beta { alpha, beta } => {
                BetaPrior::new(alpha, beta)?;
                SnbParams::new(0.5, s, t)?;
            }
        }
        Ok(TrialSession { id, created_at, s, t, model, outcomes: Vec::new() })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn created_at(&self) -> u64 {
        self.created_at
    }

    pub fn design(&self) -> (u64, u64) {
        (self.s, self.t)
    }

    pub fn model(&self) -> ResponseModel {
        self.model
    }

    pub fn outcomes(&self) -> &[bool] {
        &self.outcomes
    }

    pub fn s_obs(&self) -> u64 {
        self.outcomes.iter().filter(|&&o| o).count() as u64
    }

    pub fn t_obs(&self) -> u64 {
        self.outcomes.len() as u64 - self.s_obs()
    }

    pub fn status(&self) -> TrialStatus {
        if self.s_obs() == self.s {
            TrialStatus::StoppedSuccess
        } else if self.t_obs() == self.t {
            TrialStatus::StoppedFutility
        } else {
            TrialStatus::Ongoing
        }
    }

    pub fn record(&mut self, response: bool) -> Result<(), SessionError> {
        match self.status() {
            TrialStatus::Ongoing => {
                self.outcomes.push(response);
                Ok(())
            }
            TrialStatus::StoppedSuccess => Err(SessionError::Conflict(format!(
                "trial already stopped: success endpoint ({} responders) reached at enrollment {}",
                self.s,
                self.outcomes.len()
            ))),
            TrialStatus::StoppedFutility => Err(SessionError::Conflict(format!(
                "trial already stopped: futility endpoint ({} non-responders) reached at enrollment {}",
                self.t,
                self.outcomes.len()
            ))),
        }
    }

    pub fn undo(&mut self) -> Result<bool, SessionError> {
        self.outcomes
            .pop()
            .ok_or_else(|| SessionError::Conflict("no outcomes to undo".to_string()))
    }

    /// Posterior of `p` given the log; the counts are plain binomial data.
    fn posterior_beta(&self) -> Option<BetaDist> {
        match self.model {
            ResponseModel::Fixed { .. } => None,
            ResponseModel::Beta { alpha, beta } => Some(BetaDist {
                a: alpha + self.s_obs() as f64,
                b: beta + self.t_obs() as f64,
            }),
        }
    }

    pub fn report(&self) -> Result<InterimReport, SessionError> {
        let (s_obs, t_obs) = (self.s_obs(), self.t_obs());
        let status = self.status();
        let posterior = match (self.model, self.posterior_beta()) {
            (_, Some(c)) => PosteriorSummary::Beta { a: c.a, b: c.b },
            (ResponseModel::Fixed { p }, None) => PosteriorSummary::Point { p },
            (ResponseModel::Beta { .. }, None) => unreachable!("beta model always has a posterior"),
        };
        let (remaining, predicted) = match status {
            TrialStatus::StoppedSuccess => (None, 1.0),
            TrialStatus::StoppedFutility => (None, 0.0),
            TrialStatus::Ongoing => {
                let (s_rem, t_rem) = (self.s - s_obs, self.t - t_obs);
                let (pmf, predicted) = match self.model {
                    ResponseModel::Fixed { p } => {
                        let law = SnbParams::new(p, self.s, self.t)?.conditional_remaining(s_obs, t_obs)?;
                        let pmf = law.support_iter().map(|k| (k, law.pmf(k))).collect::<Vec<_>>();
                        (pmf, law.success_probability())
                    }
                    ResponseModel::Beta { alpha, beta } => {
                        let prior = BetaPrior::new(alpha, beta)?;
                        let pmf = bayes::predictive_remaining(&prior, self.s, self.t, s_obs, t_obs)?;
                        let predicted =
                            bayes::predicted_success_probability(&prior, self.s, self.t, s_obs, t_obs)?;
                        (pmf, predicted)
                    }
                };
                let remaining = RemainingLaw {
                    s: s_rem,
                    t: t_rem,
                    support: [s_rem.min(t_rem), s_rem + t_rem - 1],
                    pmf: pmf.into_iter().map(|(k, probability)| PmfPoint { k, probability }).collect(),
                };
                (Some(remaining), predicted)
            }
        };
        Ok(InterimReport {
            id: self.id.clone(),
            created_at: self.created_at,
            s: self.s,
            t: self.t,
            model: self.model,
            status,
            s_obs,
            t_obs,
            enrolled: self.outcomes.len() as u64,
            outcomes: self.outcomes.clone(),
            remaining,
            posterior,
            predicted_success_probability: predicted,
        })
    }

    pub fn posterior_view(&self) -> PosteriorView {
        let Some(c) = self.posterior_beta() else {
            let ResponseModel::Fixed { p } = self.model else { unreachable!() };
            return PosteriorView {
                id: self.id.clone(),
                posterior: PosteriorSummary::Point { p },
                components: Vec::new(),
                density: Vec::new(),
            };
        };
        let density = (0..POSTERIOR_GRID)
            .map(|i| {
                let p = (i as f64 + 0.5) / POSTERIOR_GRID as f64;
                DensityPoint { p, density: c.density(p) }
            })
            .collect();
        PosteriorView {
            id: self.id.clone(),
            posterior: PosteriorSummary::Beta { a: c.a, b: c.b },
            components: vec![MixtureComponent { weight: 1.0, a: c.a, b: c.b }],
            density,
        }
    }
}
