use super::stats::{covariance, mean_and_stderr, third_central, with_influence, Estimate};
use super::{require_trials, MCEstimate};
use crate::ensembles::{sample, sample_band, trial_seed, Ensemble, EnsembleSpec};
use crate::exact::{harer_zagier_moments, MomentKind, MomentSequence, MomentValue};
use crate::linalg::TRACE_POWER_CAP;
use crate::{par, Error, Result};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Per-trial normalized traces: `by_order[p][t] = (1/N) Tr H_t^p`.
#[derive(Clone, Debug)]
pub struct TraceSamples {
    pub by_order: Vec<Vec<f64>>,
}

impl TraceSamples {
    pub fn trials(&self) -> usize {
        self.by_order.first().map_or(0, Vec::len)
    }

    pub fn order(&self, p: usize) -> &[f64] {
        &self.by_order[p]
    }
}

pub fn trace_power_samples(
    spec: &EnsembleSpec,
    max_order: usize,
    trials: u64,
) -> Result<TraceSamples> {
    spec.validate()?;
    if max_order > TRACE_POWER_CAP {
        return Err(Error::PowerCap {
            k: max_order,
            cap: TRACE_POWER_CAP,
        });
    }
    let rows = par::try_map_trials(trials, |t| {
        sample(spec, t)
            .and_then(|m| m.trace_power_means(max_order))
            .map_err(|e| e.in_trial(t))
    })?;
    let mut by_order = vec![Vec::with_capacity(rows.len()); max_order + 1];
    for row in rows {
        for (p, x) in row.into_iter().enumerate() {
            by_order[p].push(x);
        }
    }
    Ok(TraceSamples { by_order })
}

/// Mean of `(1/N) Tr H^p` for `p = 0..=max_order`, with standard errors.
pub fn mc_moments(spec: &EnsembleSpec, max_order: usize, trials: u64) -> Result<MomentSequence> {
    require_trials(trials, 2)?;
    let s = trace_power_samples(spec, max_order, trials)?;
    let values = s
        .by_order
        .iter()
        .map(|xs| {
            let e = mean_and_stderr(xs);
            MomentValue::Estimate {
                value: e.value,
                stderr: e.stderr,
            }
        })
        .collect();
    let kind = match spec.kind {
        Ensemble::Band => MomentKind::Band,
        _ => MomentKind::FiniteN,
    };
    Ok(MomentSequence::new(
        kind,
        Some(spec.n),
        spec.band_param(),
        spec.v,
        values,
    ))
}

/// Band-only variant of [`mc_moments`] that estimates `(1/N) Tr H^p` per
/// trial from `sites` stratified random diagonal entries `(H^p)_xx`.
///
/// The per-trial estimate is unbiased, so the result targets the same
/// expectation; the extra site-sampling noise is part of the standard error.
/// Used where full band products are too costly (large `b`).
pub fn mc_moments_sampled_sites(
    spec: &EnsembleSpec,
    max_order: usize,
    trials: u64,
    sites: usize,
) -> Result<MomentSequence> {
    require_trials(trials, 2)?;
    spec.validate()?;
    if spec.kind != Ensemble::Band {
        return Err(Error::invalid("site sampling needs a BAND spec"));
    }
    let n = spec.n;
    let sites = sites.clamp(1, n);
    let rows = par::try_map_trials(trials, |t| {
        let m = sample_band(spec, t).map_err(|e| e.in_trial(t))?;
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec.master_seed, t) ^ SITE_STREAM);
        let mut acc = vec![0.0; max_order + 1];
        for i in 0..sites {
            let (lo, hi) = (i * n / sites, (i + 1) * n / sites);
            let x = rng.random_range(lo..hi);
            let w = (hi - lo) as f64 / n as f64;
            for (a, d) in acc.iter_mut().zip(m.site_power_diagonal(x, max_order)) {
                *a += w * d;
            }
        }
        Ok::<_, Error>(acc)
    })?;
    let values = (0..=max_order)
        .map(|p| {
            let xs: Vec<f64> = rows.iter().map(|r| r[p]).collect();
            let e = mean_and_stderr(&xs);
            MomentValue::Estimate {
                value: e.value,
                stderr: e.stderr,
            }
        })
        .collect();
    Ok(MomentSequence::new(
        MomentKind::Band,
        Some(n),
        Some(spec.b),
        spec.v,
        values,
    ))
}

const SITE_STREAM: u64 = 0x5173_5eed_0000_0001;

fn require_gue(spec: &EnsembleSpec) -> Result<()> {
    if spec.kind != Ensemble::Gue {
        return Err(Error::invalid(format!(
            "expected a GUE spec, got {}",
            spec.kind
        )));
    }
    Ok(())
}

/// `D_{a1,a2} = Cov((1/N) Tr H^{a1}, (1/N) Tr H^{a2})`.
pub fn cov_d2(spec: &EnsembleSpec, a1: usize, a2: usize, trials: u64) -> Result<MCEstimate> {
    require_gue(spec)?;
    require_trials(trials, 2)?;
    if a1 == 0 || a2 == 0 {
        return Err(Error::invalid("covariance orders must be at least 1"));
    }
    let s = trace_power_samples(spec, a1.max(a2), trials)?;
    let (c, infl) = covariance(s.order(a1), s.order(a2));
    Ok(MCEstimate::new(with_influence(c, &infl), trials, spec))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecursionResidual {
    pub a1: usize,
    pub a2: usize,
    pub lhs: MCEstimate,
    pub rhs: MCEstimate,
    /// `lhs − rhs`, with a standard error that accounts for the correlation
    /// between both sides.
    pub residual: MCEstimate,
}

/// Checks the second-order covariance recursion
///
/// `D_{a1,a2} = 2v² Σ_{j=0}^{a1−2} M_j D_{a1−2−j,a2}
///            + v² Σ_{j=1}^{a1−3} D³_{j,a1−2−j,a2}
///            + (a2/N²) v² M_{a1+a2−2}`
///
/// with exact `M` and Monte Carlo `D`, `D³` from one trial stream.
pub fn d2_recursion_residual(
    spec: &EnsembleSpec,
    a1: usize,
    a2: usize,
    trials: u64,
) -> Result<RecursionResidual> {
    require_gue(spec)?;
    require_trials(trials, 3)?;
    if a1 < 2 || a2 < 1 {
        return Err(Error::invalid("need a1 >= 2 and a2 >= 1"));
    }
    let v = BigRational::from_float(spec.v).ok_or_else(|| Error::invalid("v is not finite"))?;
    let exact = harer_zagier_moments((a1 + a2) / 2 + 1, spec.n, &v);
    let m = |j: usize| exact.value(j);
    let v2 = spec.v * spec.v;
    let n2 = (spec.n * spec.n) as f64;

    let s = trace_power_samples(spec, a1.max(a2), trials)?;
    let t = s.trials();
    let (lhs, lhs_if) = covariance(s.order(a1), s.order(a2));

    let mut rhs = a2 as f64 / n2 * v2 * m(a1 + a2 - 2);
    let mut rhs_if = vec![0.0; t];
    for j in 0..=a1 - 2 {
        let p = a1 - 2 - j;
        if p == 0 || m(j) == 0.0 {
            continue; // (1/N) Tr H^0 is constant
        }
        let coef = 2.0 * v2 * m(j);
        let (d, infl) = covariance(s.order(p), s.order(a2));
        rhs += coef * d;
        rhs_if
            .iter_mut()
            .zip(&infl)
            .for_each(|(r, i)| *r += coef * i);
    }
    for j in 1..a1.saturating_sub(2) {
        let p = a1 - 2 - j;
        let (d3, infl) = third_central(s.order(j), s.order(p), s.order(a2));
        rhs += v2 * d3;
        rhs_if.iter_mut().zip(&infl).for_each(|(r, i)| *r += v2 * i);
    }
    let diff_if: Vec<f64> = lhs_if.iter().zip(&rhs_if).map(|(a, b)| a - b).collect();
    let est = |e: Estimate| MCEstimate::new(e, trials, spec);
    Ok(RecursionResidual {
        a1,
        a2,
        lhs: est(with_influence(lhs, &lhs_if)),
        rhs: est(with_influence(rhs, &rhs_if)),
        residual: est(with_influence(lhs - rhs, &diff_if)),
    })
}
