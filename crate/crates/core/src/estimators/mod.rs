//! Monte Carlo estimators with standard errors.
//!
//! Every estimator draws trials `0..trials` from [`crate::ensembles::sample`],
//! evaluates them on the trial pool and reduces in trial order, so results
//! depend only on `(spec, trials)`.

mod identities;
mod moments;
mod norms;
mod stats;

pub use identities::{ibp_residual, site_moment, site_moment_residual, IbpResidual, SiteMoment};
pub use moments::{
    cov_d2, d2_recursion_residual, mc_moments, mc_moments_sampled_sites, trace_power_samples,
    RecursionResidual, TraceSamples,
};
pub use norms::{ks_distance, lmax_samples, tail_probability, LmaxSummary};
pub use stats::{mean_and_stderr, Estimate};

use crate::ensembles::EnsembleSpec;
use crate::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub spec: EnsembleSpec,
}

impl MCEstimate {
    pub fn new(e: Estimate, trials: u64, spec: &EnsembleSpec) -> Self {
        MCEstimate {
            value: e.value,
            stderr: e.stderr,
            trials,
            spec: spec.clone(),
        }
    }

    /// `|value − target| ≤ z·stderr`.
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.value - target).abs() <= z * self.stderr
    }

    /// Distance from `target` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.value - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

fn require_trials(trials: u64, min: u64) -> Result<()> {
    if trials < min {
        Err(Error::invalid(format!(
            "need at least {min} trials, got {trials}"
        )))
    } else {
        Ok(())
    }
}
