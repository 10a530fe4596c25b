//! The stopped negative binomial distribution.
//!
//! With `q = 1 - p`, the mass at `k` is the sum of two negative binomial
//! terms, one for trials absorbed by the success boundary and one for
//! trials absorbed by the futility boundary:
//!
//! ```text
//! P[Y = k] = C(k-1, s-1) p^s q^(k-s) 1{s <= k <= s+t-1}
//!          + C(k-1, t-1) q^t p^(k-t) 1{t <= k <= s+t-1}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Result, SnbError};
use crate::special::{ln_choose_unchecked, reg_inc_beta};

/// Parameters `(p, s, t)` of one SNB distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnbParams {
    p: f64,
    s: u64,
    t: u64,
}

/// The two summands of the pmf at one stopping time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointMass {
    pub k: u64,
    /// Mass of paths stopped by reaching `s` responders at trial `k`.
    pub success_mass: f64,
    /// Mass of paths stopped by reaching `t` non-responders at trial `k`.
    pub failure_mass: f64,
}

impl EndpointMass {
    pub fn total(&self) -> f64 {
        self.success_mass + self.failure_mass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// `ln S(k, prob, r) = ln[C(k-1, r-1) prob^r (1-prob)^(k-r)]` for `k >= r`,
/// with `0^0 = 1`.
fn ln_negbin_mass(k: u64, prob: f64, r: u64) -> f64 {
    debug_assert!(k >= r && r >= 1);
    let extra = k - r;
    let ln_p = if prob == 0.0 { f64::NEG_INFINITY } else { prob.ln() };
    let ln_q = (-prob).ln_1p();
    let term_q = if extra == 0 { 0.0 } else { extra as f64 * ln_q };
    ln_choose_unchecked(k - 1, r - 1) + r as f64 * ln_p + term_q
}

impl SnbParams {
    pub fn new(p: f64, s: u64, t: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(SnbError::domain(format!("p must lie in [0, 1], got {p}")));
        }
        if s == 0 || t == 0 {
            return Err(SnbError::domain(format!(
                "endpoints must be positive integers, got s={s}, t={t}"
            )));
        }
        Ok(SnbParams { p, s, t })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Largest possible stopping time, `s + t - 1`.
    pub fn max_trials(&self) -> u64 {
        self.s + self.t - 1
    }

    /// Inclusive support `[min(s, t), s + t - 1]`.
    pub fn support(&self) -> (u64, u64) {
        (self.s.min(self.t), self.max_trials())
    }

    pub fn support_iter(&self) -> std::ops::RangeInclusive<u64> {
        let (lo, hi) = self.support();
        lo..=hi
    }

    pub fn in_support(&self, k: u64) -> bool {
        let (lo, hi) = self.support();
        (lo..=hi).contains(&k)
    }

    /// The two pmf summands at `k`; both are zero outside the support.
    pub fn endpoint_split(&self, k: u64) -> EndpointMass {
        let hi = self.max_trials();
        let mut split = EndpointMass { k, success_mass: 0.0, failure_mass: 0.0 };
        if k > hi {
            return split;
        }
        // Degenerate processes are deterministic straight lines.
        if self.p == 1.0 {
            split.success_mass = if k == self.s { 1.0 } else { 0.0 };
            return split;
        }
        if self.p == 0.0 {
            split.failure_mass = if k == self.t { 1.0 } else { 0.0 };
            return split;
        }
        if k >= self.s {
            split.success_mass = ln_negbin_mass(k, self.p, self.s).exp();
        }
        if k >= self.t {
            split.failure_mass = ln_negbin_mass(k, self.q(), self.t).exp();
        }
        split
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.endpoint_split(k).total()
    }

    /// pmf over the support, starting at `min(s, t)`.
    pub fn pmf_vec(&self) -> Vec<f64> {
        self.support_iter().map(|k| self.pmf(k)).collect()
    }

    /// Cumulative sums of the pmf over the support; the last entry is 1.
    fn cdf_vec(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .pmf_vec()
            .into_iter()
            .map(|m| {
                acc += m;
                acc.min(1.0)
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }

    pub fn cdf(&self, k: u64) -> f64 {
        let (lo, hi) = self.support();
        if k < lo {
            return 0.0;
        }
        if k >= hi {
            return 1.0;
        }
        self.cdf_vec()[(k - lo) as usize]
    }

    /// Smallest `k` in the support with `cdf(k) >= u`.
    pub fn quantile(&self, u: f64) -> Result<u64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(SnbError::domain(format!("quantile level must lie in [0, 1], got {u}")));
        }
        let (lo, hi) = self.support();
        if u == 0.0 {
            return Ok(lo);
        }
        let pos = self.cdf_vec().iter().position(|&c| c >= u);
        Ok(pos.map_or(hi, |i| lo + i as u64))
    }

    pub fn moments(&self) -> Moments {
        let pmf = self.pmf_vec();
        let mean: f64 = self.support_iter().zip(&pmf).map(|(k, m)| k as f64 * m).sum();
        let variance: f64 = self
            .support_iter()
            .zip(&pmf)
            .map(|(k, m)| (k as f64 - mean).powi(2) * m)
            .sum();
        Moments { mean, variance }
    }

    /// Probability that the trial stops on the success boundary, `I_p(s, t)`.
    pub fn success_probability(&self) -> f64 {
        if self.p == 0.0 {
            return 0.0;
        }
        if self.p == 1.0 {
            return 1.0;
        }
        // Arguments are validated at construction.
        1.0 - reg_inc_beta(self.q(), self.t as f64, self.s as f64).unwrap_or(f64::NAN)
    }

    /// Moment generating function `E[exp(xY)]` via the incomplete-beta
    /// closed form.
    ///
    /// Defined for `x < min(ln(1/p), ln(1/q))`; point-mass distributions are
    /// refused.
    pub fn mgf(&self, x: f64) -> Result<f64> {
        let (p, q) = (self.p, self.q());
        if p == 0.0 || p == 1.0 {
            let k = if p == 0.0 { self.t } else { self.s };
            return Err(SnbError::Degenerate { p, k });
        }
        if x.is_nan() {
            return Err(SnbError::domain("mgf argument is NaN"));
        }
        // smaller of the two roundings of ln(1/p)
        let bound_p = (-p.ln()).min((1.0 / p).ln());
        let bound_q = (-q.ln()).min((1.0 / q).ln());
        if x >= bound_p {
            return Err(SnbError::domain(format!(
                "mgf requires x < ln(1/p) = {bound_p}, got {x}"
            )));
        }
        if x >= bound_q {
            return Err(SnbError::domain(format!(
                "mgf requires x < ln(1/q) = {bound_q}, got {x}"
            )));
        }
        let ln_pe = p.ln() + x;
        let ln_qe = q.ln() + x;
        // 1 - q e^x and 1 - p e^x, both in (0, 1].
        let one_minus_qe = -ln_qe.exp_m1();
        let one_minus_pe = -ln_pe.exp_m1();
        let (s, t) = (self.s as f64, self.t as f64);
        let term = |ln_ratio: f64, power: f64, ibeta: f64| -> f64 {
            if ibeta == 0.0 {
                0.0
            } else {
                (power * ln_ratio + ibeta.ln()).exp()
            }
        };
        let first = term(ln_pe - one_minus_qe.ln(), s, reg_inc_beta(one_minus_qe, s, t)?);
        let second = term(ln_qe - one_minus_pe.ln(), t, reg_inc_beta(one_minus_pe, t, s)?);
        Ok(first + second)
    }

    /// Law of the remaining enrollments after `s_obs` responders and `t_obs`
    /// non-responders: `SNB(p, s - s_obs, t - t_obs)`.
    pub fn conditional_remaining(&self, s_obs: u64, t_obs: u64) -> Result<SnbParams> {
        if s_obs >= self.s {
            return Err(SnbError::TrialStopped(format!(
                "{s_obs} responders already reach the success endpoint s={}",
                self.s
            )));
        }
        if t_obs >= self.t {
            return Err(SnbError::TrialStopped(format!(
                "{t_obs} non-responders already reach the futility endpoint t={}",
                self.t
            )));
        }
        SnbParams::new(self.p, self.s - s_obs, self.t - t_obs)
    }

    /// Same shape with success and failure relabelled: `SNB(1-p, t, s)`.
    pub fn relabeled(&self) -> SnbParams {
        SnbParams { p: 1.0 - self.p, s: self.t, t: self.s }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_law;
    use proptest::prelude::*;

    fn trial() -> SnbParams {
        SnbParams::new(0.2, 7, 11).unwrap()
    }

    #[test]
    fn construction_rejects_invalid_parameters() {
        assert!(SnbParams::new(-0.1, 1, 1).is_err());
        assert!(SnbParams::new(1.1, 1, 1).is_err());
        assert!(SnbParams::new(f64::NAN, 1, 1).is_err());
        assert!(SnbParams::new(0.5, 0, 1).is_err());
        assert!(SnbParams::new(0.5, 1, 0).is_err());
    }

    #[test]
    fn support_examples() {
        assert_eq!(trial().support(), (7, 17));
        assert_eq!(SnbParams::new(0.5, 1, 1).unwrap().support(), (1, 1));
        assert_eq!(SnbParams::new(0.5, 4, 2).unwrap().support(), (2, 5));
    }

    #[test]
    fn degenerate_point_masses() {
        let all_success = SnbParams::new(1.0, 3, 9).unwrap();
        let all_failure = SnbParams::new(0.0, 3, 9).unwrap();
        for k in 0..=12 {
            assert_eq!(all_success.pmf(k), if k == 3 { 1.0 } else { 0.0 });
            assert_eq!(all_failure.pmf(k), if k == 9 { 1.0 } else { 0.0 });
        }
        assert_eq!(all_success.moments(), Moments { mean: 3.0, variance: 0.0 });
        assert_eq!(all_failure.moments(), Moments { mean: 9.0, variance: 0.0 });
        assert_eq!(all_success.quantile(0.5).unwrap(), 3);
        assert_eq!(all_success.quantile(1.0).unwrap(), 3);
    }

    #[test]
    fn pmf_matches_enumeration_for_motivating_trial() {
        let law = enumerate_law(&trial()).unwrap();
        for k in 0..=20 {
            let want = law.pmf_by_k.get(&k).copied().unwrap_or(0.0);
            assert!((trial().pmf(k) - want).abs() < 1e-12, "k={k}");
        }
        assert!((trial().cdf(12) - law.cdf(12)).abs() < 1e-12);
        let m = trial().moments();
        assert!((m.mean - law.mean).abs() < 1e-12);
        assert!((m.variance - law.variance).abs() < 1e-11);
        assert_eq!(trial().quantile(0.5).unwrap(), law.quantile(0.5));
    }

    #[test]
    fn cdf_edges() {
        let d = trial();
        assert_eq!(d.cdf(6), 0.0);
        assert_eq!(d.cdf(17), 1.0);
        assert_eq!(d.cdf(40), 1.0);
        assert_eq!(d.quantile(0.0).unwrap(), 7);
        assert_eq!(d.quantile(1.0).unwrap(), 17);
        assert!(d.quantile(1.5).is_err());
    }

    #[test]
    fn endpoint_split_examples() {
        let d = trial();
        assert_eq!(d.endpoint_split(9).failure_mass, 0.0);
        let at7 = d.endpoint_split(7);
        assert!((at7.success_mass / 0.2f64.powi(7) - 1.0).abs() < 1e-14);
        assert_eq!(at7.failure_mass, 0.0);
        let at15 = d.endpoint_split(15);
        assert!(at15.success_mass > 0.0 && at15.failure_mass > 0.0);
        let law = enumerate_law(&d).unwrap();
        assert!((at15.success_mass - law.success_mass_by_k[&15]).abs() < 1e-12);
        assert!((at15.total() - d.pmf(15)).abs() < 1e-18);
    }

    #[test]
    fn success_probability_examples() {
        assert_eq!(SnbParams::new(1.0, 4, 9).unwrap().success_probability(), 1.0);
        let riffle = SnbParams::new(0.5, 3, 3).unwrap();
        assert!((riffle.success_probability() - 0.5).abs() < 1e-15);
        // P[Binomial(17, 0.2) >= 7]
        let tail: f64 = (7..=17u32)
            .map(|j| {
                let c = crate::special::log_choose(17, j as u64).unwrap().exp();
                c * 0.2f64.powi(j as i32) * 0.8f64.powi(17 - j as i32)
            })
            .sum();
        let got = trial().success_probability();
        assert!((got - tail).abs() < 1e-12);
        assert!(got <= 0.1);
    }

    #[test]
    fn mgf_examples() {
        let d = trial();
        assert!((d.mgf(0.0).unwrap() - 1.0).abs() < 1e-12);
        let direct: f64 = d.support_iter().map(|k| (0.1 * k as f64).exp() * d.pmf(k)).sum();
        let got = d.mgf(0.1).unwrap();
        assert!(((got - direct) / direct).abs() < 1e-10);

        let near_nb = SnbParams::new(0.3, 2, 500).unwrap();
        let x = 0.05f64;
        let nb = (0.3 * x.exp() / (1.0 - 0.7 * x.exp())).powi(2);
        assert!((near_nb.mgf(x).unwrap() - nb).abs() < 1e-6);
    }

    #[test]
    fn mgf_domain_errors() {
        let d = trial();
        let bound = (1.0f64 / 0.8).ln();
        assert!(matches!(d.mgf(bound), Err(SnbError::Domain(msg)) if msg.contains("ln(1/q)")));
        let d = SnbParams::new(0.9, 2, 2).unwrap();
        assert!(matches!(d.mgf((1.0f64 / 0.9).ln()), Err(SnbError::Domain(msg)) if msg.contains("ln(1/p)")));
        assert!(matches!(
            SnbParams::new(0.0, 2, 3).unwrap().mgf(0.0),
            Err(SnbError::Degenerate { k: 3, .. })
        ));
        assert!(matches!(
            SnbParams::new(1.0, 2, 3).unwrap().mgf(0.0),
            Err(SnbError::Degenerate { k: 2, .. })
        ));
    }

    #[test]
    fn conditional_remaining_examples() {
        let d = trial();
        assert_eq!(d.conditional_remaining(0, 0).unwrap(), d);
        assert_eq!(d.conditional_remaining(6, 8).unwrap(), SnbParams::new(0.2, 1, 3).unwrap());
        assert!(matches!(d.conditional_remaining(7, 0), Err(SnbError::TrialStopped(_))));
        assert!(matches!(d.conditional_remaining(0, 11), Err(SnbError::TrialStopped(_))));
    }

    #[test]
    fn large_endpoints_stay_finite() {
        // C(k-1, s-1) overflows f64 long before these sizes.
        let d = SnbParams::new(0.4, 900, 1400).unwrap();
        let total: f64 = d.pmf_vec().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn relabeling_symmetry(p in 0.0f64..=1.0, s in 1u64..15, t in 1u64..15) {
            let d = SnbParams::new(p, s, t).unwrap();
            let r = d.relabeled();
            for k in d.support_iter() {
                prop_assert!((d.pmf(k) - r.pmf(k)).abs() <= 1e-12);
            }
        }

        #[test]
        fn quantile_inverts_cdf(p in 0.0f64..=1.0, s in 1u64..12, t in 1u64..12, u in 0.0f64..=1.0) {
            let d = SnbParams::new(p, s, t).unwrap();
            let k = d.quantile(u).unwrap();
            prop_assert!(d.in_support(k));
            prop_assert!(d.cdf(k) >= u);
            if k > d.support().0 {
                prop_assert!(d.cdf(k - 1) < u);
            }
        }

        #[test]
        fn moments_within_support(p in 0.0f64..=1.0, s in 1u64..20, t in 1u64..20) {
            let d = SnbParams::new(p, s, t).unwrap();
            let m = d.moments();
            let (lo, hi) = d.support();
            prop_assert!(m.mean >= lo as f64 - 1e-12 && m.mean <= hi as f64 + 1e-12);
            prop_assert!(m.variance >= 0.0);
        }
    }
}
