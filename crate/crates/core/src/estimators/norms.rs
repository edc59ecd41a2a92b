use super::stats::mean_and_stderr;
use super::{require_trials, Estimate, MCEstimate};
use crate::ensembles::{sample, EnsembleSpec};
use crate::exact::semicircle_cdf;
use crate::linalg::{spectral_norm_with, LanczosOptions, NormMethod, SpectrumSummary};
use crate::{par, Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LmaxSummary {
    /// Per-trial spectral norms in trial order.
    pub values: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub q95: f64,
    /// Trials whose Lanczos runs stopped at the step cap.
    pub unconverged: usize,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

impl LmaxSummary {
    pub fn from_values(values: Vec<f64>, unconverged: usize) -> Self {
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let e = mean_and_stderr(&values);
        LmaxSummary {
            mean: e.value,
            stderr: e.stderr,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            median: quantile(&sorted, 0.5),
            q95: quantile(&sorted, 0.95),
            values,
            unconverged,
        }
    }
}

pub fn lmax_samples(spec: &EnsembleSpec, trials: u64, method: NormMethod) -> Result<LmaxSummary> {
    require_trials(trials, 1)?;
    spec.validate()?;
    let opts = LanczosOptions::default();
    let norms = par::try_map_trials(trials, |t| {
        sample(spec, t)
            .and_then(|m| spectral_norm_with(&m, method, &opts))
            .map_err(|e| e.in_trial(t))
    })?;
    let unconverged = norms.iter().filter(|e| !e.converged).count();
    Ok(LmaxSummary::from_values(
        norms.iter().map(|e| e.value).collect(),
        unconverged,
    ))
}

/// Fraction of trials with `l_max ≥ 2v(1 + eps)`, binomial standard error.
pub fn tail_probability(
    spec: &EnsembleSpec,
    eps: f64,
    trials: u64,
    method: NormMethod,
) -> Result<MCEstimate> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    require_trials(trials, 1)?;
    let threshold = 2.0 * spec.v * (1.0 + eps);
    let lmax = lmax_samples(spec, trials, method)?;
    let hits = lmax.values.iter().filter(|&&l| l >= threshold).count();
    let p = hits as f64 / trials as f64;
    Ok(MCEstimate::new(
        Estimate {
            value: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        },
        trials,
        spec,
    ))
}

/// Kolmogorov distance between the empirical spectral CDF and the
/// semicircle CDF, evaluated on both sides of every jump.
pub fn ks_distance(eigs: &SpectrumSummary, v: f64) -> f64 {
    let n = eigs.eigenvalues.len() as f64;
    eigs.eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let f = semicircle_cdf(l, v);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::semicircle_quantile;
    use crate::linalg::{eigenvalues, HermitianMatrix};

    #[test]
    fn quantiles() {
        let s = LmaxSummary::from_values(vec![3.0, 1.0, 2.0, 4.0, 5.0], 0);
        assert_eq!(s.median, 3.0);
        assert_eq!(s.max, 5.0);
        assert_eq!(s.min, 1.0);
        assert!((s.q95 - 4.8).abs() < 1e-12);
        assert_eq!(s.values[0], 3.0);
    }

    #[test]
    fn ks_at_semicircle_quantiles() {
        for n in [1usize, 10, 333] {
            let vals: Vec<f64> = (0..n)
                .map(|i| semicircle_quantile((i as f64 + 0.5) / n as f64, 1.0))
                .collect();
            let s = SpectrumSummary::new(vals, 0.0);
            let d = ks_distance(&s, 1.0);
            assert!((d - 0.5 / n as f64).abs() < 1e-12, "{d}");
        }
    }

    #[test]
    fn ks_of_deterministic_spectrum() {
        let m = HermitianMatrix::from_real_diagonal(&[5.0, -5.0]);
        let d = ks_distance(&eigenvalues(&m).unwrap(), 1.0);
        assert_eq!(d, 0.5);
    }

    #[test]
    fn far_tail_is_empty() {
        let spec = EnsembleSpec::gue(20, 1.0, 3);
        let p = tail_probability(&spec, 10.0, 100, NormMethod::Full).unwrap();
        assert_eq!(p.value, 0.0);
        assert_eq!(p.stderr, 0.0);
        assert!(tail_probability(&spec, -1.0, 10, NormMethod::Full).is_err());
        assert!(tail_probability(&spec, 0.0, 10, NormMethod::Full).is_err());
    }

    #[test]
    fn lanczos_and_full_agree_per_trial() {
        let spec = EnsembleSpec::band(300, 20, 1.0, 4);
        let a = lmax_samples(&spec, 3, NormMethod::Full).unwrap();
        let b = lmax_samples(&spec, 3, NormMethod::Lanczos).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-6 * x, "{x} vs {y}");
        }
        assert_eq!(b.unconverged, 0);
    }
}
