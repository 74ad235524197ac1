//! Face-value, observed-data and empirical-supremum log-likelihoods.
//!
//! All likelihood arithmetic is carried out in log space; minus infinity is
//! a first-class value meaning "some observed set has probability zero", not
//! an error. A second-order coarse data model (treating the observation
//! events themselves as coarse data) is always ignorable and needs no code:
//! its correction factor is identically one.

use crate::error::Result;
use crate::model::{joint_obs_prob_mask, CoarseningKernel, CompleteDistribution, ObservedSample};

/// A log-likelihood value; `NEG_INFINITY` encodes likelihood zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogLikelihood(f64);

impl LogLikelihood {
    pub const NEG_INFINITY: LogLikelihood = LogLikelihood(f64::NEG_INFINITY);
    pub const ZERO: LogLikelihood = LogLikelihood(0.0);

    pub fn new(value: f64) -> LogLikelihood {
        debug_assert!(!value.is_nan());
        LogLikelihood(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Back on the probability scale (zero for `NEG_INFINITY`).
    pub fn prob(self) -> f64 {
        self.0.exp()
    }
}

impl std::ops::Add for LogLikelihood {
    type Output = LogLikelihood;
    fn add(self, rhs: LogLikelihood) -> LogLikelihood {
        LogLikelihood(self.0 + rhs.0)
    }
}

impl std::fmt::Display for LogLikelihood {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 == f64::NEG_INFINITY {
            write!(f, "-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn log_or_neg_inf(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Face-value log-likelihood: `sum_U count(U) * log P_theta(U)`.
///
/// `NEG_INFINITY` exactly when some observed set has probability zero.
pub fn log_lfv(theta: &CompleteDistribution, sample: &ObservedSample) -> Result<LogLikelihood> {
    theta.world().check_same(sample.world())?;
    let mut total = 0.0;
    for (&mask, &count) in sample.mask_counts() {
        let p = theta.prob_of_mask(mask);
        let lp = log_or_neg_inf(p);
        if lp == f64::NEG_INFINITY {
            return Ok(LogLikelihood::NEG_INFINITY);
        }
        total += count as f64 * lp;
    }
    Ok(LogLikelihood::new(total))
}

/// Observed-data log-likelihood: `sum_U count(U) * log P_{theta,lambda}(O_U)`.
pub fn log_lod(
    theta: &CompleteDistribution,
    kernel: &CoarseningKernel,
    sample: &ObservedSample,
) -> Result<LogLikelihood> {
    theta.world().check_same(kernel.world())?;
    theta.world().check_same(sample.world())?;
    let mut total = 0.0;
    for (&mask, &count) in sample.mask_counts() {
        let p = joint_obs_prob_mask(theta, kernel, mask);
        let lp = log_or_neg_inf(p);
        if lp == f64::NEG_INFINITY {
            return Ok(LogLikelihood::NEG_INFINITY);
        }
        total += count as f64 * lp;
    }
    Ok(LogLikelihood::new(total))
}

/// Supremum of the observed-data log-likelihood over the fully saturated
/// coarse data model: the multinomial value `N * sum_U m(O_U) log m(O_U)`.
/// Always finite.
pub fn empirical_sup_logl(sample: &ObservedSample) -> LogLikelihood {
    let n = sample.total() as f64;
    let total = sample
        .mask_counts()
        .values()
        .map(|&c| c as f64 * (c as f64 / n).ln())
        .sum();
    LogLikelihood::new(total)
}
