//! The stopped negative binomial (SNB) distribution.
//!
//! `SNB(p, s, t)` is the law of the smallest number of Bernoulli(p) trials
//! that contain either `s` successes or `t` failures. It describes the
//! enrollment of a curtailed single-arm trial that stops as soon as `s`
//! patients respond or `t` fail to respond.
//!
//! The crate is organised by capability:
//!
//! - [`special`]: log-gamma, log-space binomial coefficients, log-beta and
//!   the regularized incomplete beta function.
//! - [`dist`]: support, pmf, cdf, quantile, moments, endpoint split, success
//!   probability, mgf and the interim conditional law.
//! - [`sampler`]: seeded simulation of full trial trajectories.
//! - [`bayes`]: beta-prior predictive law, posterior beta mixture and the
//!   predicted probability of success at an interim look.
//! - [`oracle`]: brute-force path enumeration and adaptive quadrature used
//!   to verify everything above.
//! - [`table`], [`commands`], [`cli`]: tabular output and the `snb`
//!   command line.
//! - [`service`]: the live trial-monitoring HTTP service.
//!
//! ```
//! use snb::dist::SnbParams;
//!
//! let trial = SnbParams::new(0.2, 7, 11).unwrap();
//! assert_eq!(trial.support(), (7, 17));
//! let total: f64 = (7..=17).map(|k| trial.pmf(k)).sum();
//! assert!((total - 1.0).abs() < 1e-12);
//! assert!(trial.success_probability() <= 0.1);
//! ```

pub mod bayes;
pub mod cli;
pub mod commands;
pub mod dist;
pub mod error;
pub mod oracle;
pub mod sampler;
pub mod service;
pub mod special;
pub mod table;

pub use error::{Result, SnbError};
