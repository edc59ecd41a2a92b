use super::stats::{mean_and_stderr, Estimate};
use super::{require_trials, MCEstimate};
use crate::ensembles::{in_band, sample_band, sample_gue, Ensemble, EnsembleSpec};
use crate::linalg::matrix_powers;
use crate::{par, Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IbpResidual {
    pub lhs_re: MCEstimate,
    pub lhs_im: MCEstimate,
    pub residual_re: MCEstimate,
    pub residual_im: MCEstimate,
}

impl IbpResidual {
    pub fn within(&self, z: f64) -> bool {
        self.residual_re.within(0.0, z) && self.residual_im.within(0.0, z)
    }
}

/// Gaussian integration by parts for GUE:
/// `E{H_xy (H^l)_st} = (v²/N) Σ_{j=1}^{l} E{(H^{j−1})_sy (H^{l−j})_xt}`.
///
/// Returns estimates of the left side and of `LHS − RHS` (real and
/// imaginary parts), both formed per trial from the same matrix.
pub fn ibp_residual(
    spec: &EnsembleSpec,
    (x, y, s, t): (usize, usize, usize, usize),
    l: usize,
    trials: u64,
) -> Result<IbpResidual> {
    if spec.kind != Ensemble::Gue {
        return Err(Error::invalid(
            "integration by parts is checked for GUE only",
        ));
    }
    require_trials(trials, 2)?;
    if l == 0 {
        return Err(Error::invalid("l must be at least 1"));
    }
    let n = spec.n;
    if [x, y, s, t].iter().any(|&i| i >= n) {
        return Err(Error::invalid(format!("indices must be below N = {n}")));
    }
    let c = spec.v * spec.v / n as f64;
    let rows = par::try_map_trials(trials, |trial| {
        let h = sample_gue(spec, trial).map_err(|e| e.in_trial(trial))?;
        let p = matrix_powers(&h, l);
        let lhs = h.get(x, y) * p[l].get(s, t);
        let rhs = (1..=l)
            .map(|j| p[j - 1].get(s, y) * p[l - j].get(x, t))
            .sum::<crate::C64>()
            * c;
        Ok::<_, Error>((lhs, lhs - rhs))
    })?;
    let col = |f: fn(&(crate::C64, crate::C64)) -> f64| -> MCEstimate {
        let xs: Vec<f64> = rows.iter().map(f).collect();
        MCEstimate::new(mean_and_stderr(&xs), trials, spec)
    };
    Ok(IbpResidual {
        lhs_re: col(|r| r.0.re),
        lhs_im: col(|r| r.0.im),
        residual_re: col(|r| r.1.re),
        residual_im: col(|r| r.1.im),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SiteMoment {
    pub x: usize,
    pub k: usize,
    /// `E (H^k)_xx`.
    pub at_x: MCEstimate,
    /// `E L_k[x] = E (1/b) Σ_{|s−x| ≤ b/2} (H^k)_ss`.
    pub bracket_x: MCEstimate,
}

fn require_band(spec: &EnsembleSpec, x: usize) -> Result<()> {
    if spec.kind != Ensemble::Band {
        return Err(Error::invalid("site moments need a BAND spec"));
    }
    if x >= spec.n {
        return Err(Error::invalid(format!("site {x} outside 0..{}", spec.n)));
    }
    Ok(())
}

fn window_mean(diag: &[f64], x: usize, b: usize) -> f64 {
    diag.iter()
        .enumerate()
        .filter(|(s, _)| in_band(*s, x, b))
        .map(|(_, d)| d)
        .sum::<f64>()
        / b as f64
}

/// Diagonals of `H^j`, `j = 0..=max_power`, per trial.
fn band_diagonals(
    spec: &EnsembleSpec,
    max_power: usize,
    trials: u64,
) -> Result<Vec<Vec<Vec<f64>>>> {
    par::try_map_trials(trials, |t| {
        sample_band(spec, t)
            .map(|m| m.power_diagonals(max_power))
            .map_err(|e| e.in_trial(t))
    })
}

pub fn site_moment(spec: &EnsembleSpec, x: usize, k: usize, trials: u64) -> Result<SiteMoment> {
    require_band(spec, x)?;
    require_trials(trials, 2)?;
    let diags = band_diagonals(spec, k, trials)?;
    let at: Vec<f64> = diags.iter().map(|d| d[k][x]).collect();
    let br: Vec<f64> = diags
        .iter()
        .map(|d| window_mean(&d[k], x, spec.b))
        .collect();
    Ok(SiteMoment {
        x,
        k,
        at_x: MCEstimate::new(mean_and_stderr(&at), trials, spec),
        bracket_x: MCEstimate::new(mean_and_stderr(&br), trials, spec),
    })
}

/// Site-resolved band identity
/// `E L_{2k}(x) = v² Σ_{j=0}^{2k−2} E{L_{2k−2−j}(x) · L_j[x]}`,
/// returning `LHS − RHS` estimated per trial.
pub fn site_moment_residual(
    spec: &EnsembleSpec,
    x: usize,
    k: usize,
    trials: u64,
) -> Result<MCEstimate> {
    require_band(spec, x)?;
    require_trials(trials, 2)?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let v2 = spec.v * spec.v;
    let diags = band_diagonals(spec, 2 * k, trials)?;
    let diffs: Vec<f64> = diags
        .iter()
        .map(|d| {
            let rhs: f64 = (0..=2 * k - 2)
                .map(|j| d[2 * k - 2 - j][x] * window_mean(&d[j], x, spec.b))
                .sum();
            d[2 * k][x] - v2 * rhs
        })
        .collect();
    let e: Estimate = mean_and_stderr(&diffs);
    Ok(MCEstimate::new(e, trials, spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ibp_reduces_to_covariance_rule() {
        let spec = EnsembleSpec::gue(4, 1.0, 21);
        let r = ibp_residual(&spec, (0, 1, 1, 0), 1, 20_000).unwrap();
        assert!(r.lhs_re.within(0.25, 3.0), "{r:?}");
        assert!(r.within(3.0), "{r:?}");
    }

    #[test]
    fn ibp_higher_orders() {
        let spec = EnsembleSpec::gue(8, 1.0, 22);
        for (idx, l) in [((0, 0, 0, 0), 2), ((1, 4, 4, 2), 3), ((2, 5, 5, 2), 3)] {
            let r = ibp_residual(&spec, idx, l, 20_000).unwrap();
            assert!(r.within(4.0), "{idx:?} l={l} {r:?}");
        }
        assert!(ibp_residual(&spec, (0, 0, 0, 8), 1, 10).is_err());
        assert!(ibp_residual(&spec, (0, 0, 0, 0), 0, 10).is_err());
    }

    #[test]
    fn site_identity_interior_and_edge() {
        let spec = EnsembleSpec::band(64, 16, 1.0, 23);
        for x in [0, 31] {
            let r = site_moment_residual(&spec, x, 1, 5000).unwrap();
            assert!(r.within(0.0, 3.0), "x={x} {r:?}");
            let m = site_moment(&spec, x, 2, 5000).unwrap();
            let count = (0..64).filter(|&s| in_band(s, x, 16)).count() as f64;
            assert!(m.at_x.within(count / 16.0, 3.0), "x={x} {m:?}");
        }
        let odd = site_moment(&spec, 10, 3, 5000).unwrap();
        assert!(odd.at_x.within(0.0, 3.0) && odd.bracket_x.within(0.0, 3.0));
        assert!(site_moment(&EnsembleSpec::gue(4, 1.0, 0), 0, 1, 10).is_err());
    }
}
