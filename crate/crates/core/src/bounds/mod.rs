//! Checkers for the moment and tail inequalities.
//!
//! Exact checks compare big rationals and pass iff the margin is
//! non-negative. Monte Carlo checks pass iff `margin ≥ −3·stderr`.

use crate::ensembles::EnsembleSpec;
use crate::estimators::{mc_moments, mc_moments_sampled_sites, tail_probability};
use crate::exact::{
    catalan_closed_form, harer_zagier_moments, rat, semicircle_moments, to_f64, wick_band_moment,
};
use crate::linalg::NormMethod;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

/// One-sided slack for Monte Carlo comparisons, in standard errors.
pub const MC_SLACK: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    MonteCarlo { stderr: f64, trials: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundPoint {
    pub n: usize,
    pub b: Option<usize>,
    pub k: usize,
    pub v: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
    pub provenance: Provenance,
    /// Exact sides as `p/q` strings when available.
    pub lhs_exact: Option<String>,
    pub rhs_exact: Option<String>,
    /// False for points evaluated outside the inequality's hypothesis.
    pub within_hypothesis: bool,
}

impl BoundPoint {
    fn exact(
        n: usize,
        b: Option<usize>,
        k: usize,
        v: f64,
        lhs: &BigRational,
        rhs: &BigRational,
    ) -> Self {
        let margin = rhs - lhs;
        BoundPoint {
            n,
            b,
            k,
            v,
            lhs: to_f64(lhs),
            rhs: to_f64(rhs),
            margin: to_f64(&margin),
            pass: margin >= BigRational::zero(),
            provenance: Provenance::Exact,
            lhs_exact: Some(lhs.to_string()),
            rhs_exact: Some(rhs.to_string()),
            within_hypothesis: true,
        }
    }

    fn monte_carlo(
        n: usize,
        b: Option<usize>,
        k: usize,
        v: f64,
        lhs: f64,
        stderr: f64,
        trials: u64,
        rhs: f64,
    ) -> Self {
        let margin = rhs - lhs;
        BoundPoint {
            n,
            b,
            k,
            v,
            lhs,
            rhs,
            margin,
            pass: margin >= -MC_SLACK * stderr,
            provenance: Provenance::MonteCarlo { stderr, trials },
            lhs_exact: None,
            rhs_exact: None,
            within_hypothesis: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub id: String,
    pub points: Vec<BoundPoint>,
}

impl BoundReport {
    fn new(id: &str, points: Vec<BoundPoint>) -> Self {
        BoundReport {
            id: id.to_string(),
            points,
        }
    }

    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }

    pub fn min_margin(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `k³ ≤ n`, i.e. `k ≤ n^{1/3}` in integers.
fn cube_le(k: usize, n: usize) -> bool {
    (k as u128).pow(3) <= n as u128
}

fn exact_v(v: f64) -> Result<BigRational> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::invalid(format!("v must be positive, got {v}")));
    }
    BigRational::from_float(v).ok_or_else(|| Error::invalid("v is not finite"))
}

/// `M_2k ≤ (1 + 4k³/N²)^k · m_2k` for GUE, both sides exact.
pub fn check_gue_moment_bound(n: usize, v: &BigRational, ks: &[usize]) -> Result<BoundReport> {
    if n < 4 {
        return Err(Error::Hypothesis(format!("N = {n} < 4")));
    }
    if let Some(&k) = ks.iter().find(|&&k| !cube_le(k, n)) {
        return Err(Error::Hypothesis(format!(
            "k = {k} exceeds N^(1/3) for N = {n}"
        )));
    }
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let hz = harer_zagier_moments(k_max, n, v);
    let lim = semicircle_moments(k_max, v);
    let n2 = int(n * n);
    let points = ks
        .iter()
        .map(|&k| {
            let factor = BigRational::one() + int(4 * k * k * k) / &n2;
            let rhs = num_traits::pow(factor, k) * lim.exact(2 * k);
            BoundPoint::exact(n, None, k, to_f64(v), hz.exact(2 * k), &rhs)
        })
        .collect();
    Ok(BoundReport::new("gue_moment_bound", points))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HzBoundReport {
    /// `M_2k ≤ (1 + k³/(4N²)) m_2k`.
    pub cubic: BoundReport,
    /// `M_2k ≤ (1 + k²/(4N²))^k m_2k`.
    pub power: BoundReport,
    /// Largest `(M_2k/m_2k − 1)·N²/k⁴` over the grid (0 for `k = 1` only).
    pub implied_constant: f64,
}

/// Harer–Zagier moment bounds at entry variance `1/4`.
pub fn check_hz_bounds(n: usize, ks: &[usize]) -> Result<HzBoundReport> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if ks.contains(&0) {
        return Err(Error::invalid("k must be at least 1"));
    }
    let v = rat(1, 2);
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let hz = harer_zagier_moments(k_max, n, &v);
    let lim = semicircle_moments(k_max, &v);
    let n2 = int(n * n);
    let (mut cubic, mut power) = (vec![], vec![]);
    let mut implied = BigRational::zero();
    for &k in ks {
        let m = hz.exact(2 * k);
        let l = lim.exact(2 * k);
        let rhs = (BigRational::one() + int(k * k * k) / (int(4) * &n2)) * l;
        cubic.push(BoundPoint::exact(n, None, k, 0.5, m, &rhs));
        let factor = BigRational::one() + int(k * k) / (int(4) * &n2);
        let rhs = num_traits::pow(factor, k) * l;
        power.push(BoundPoint::exact(n, None, k, 0.5, m, &rhs));
        let c = (m / l - BigRational::one()) * &n2 / int(k * k * k * k);
        if c > implied {
            implied = c;
        }
    }
    Ok(HzBoundReport {
        cubic: BoundReport::new("hz_cubic_bound", cubic),
        power: BoundReport::new("hz_power_bound", power),
        implied_constant: to_f64(&implied),
    })
}

/// Right side of the moment-method tail bound, `N/(1 + eps)^k`.
pub fn bound_tail(n: usize, eps: f64, k: usize) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Hypothesis(format!("eps = {eps} must be positive")));
    }
    if k == 0 {
        return Err(Error::Hypothesis("k must be at least 1".into()));
    }
    if !cube_le(k, n) {
        return Err(Error::Hypothesis(format!(
            "k = {k} exceeds N^(1/3) for N = {n}"
        )));
    }
    let k3 = (k as f64).powi(3);
    if 4.0 * k3 / (n as f64).powi(2) > eps {
        return Err(Error::Hypothesis(format!(
            "4k^3/N^2 = {} exceeds eps = {eps}",
            4.0 * k3 / (n as f64).powi(2)
        )));
    }
    Ok(n as f64 / (1.0 + eps).powi(k as i32))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailBound {
    pub k: usize,
    pub value: f64,
    /// The bound exceeds 1 and says nothing about a probability.
    pub vacuous: bool,
}

/// Smallest admissible tail bound; the bound decreases in `k`, so this is
/// the largest `k` that satisfies both hypotheses.
pub fn min_over_k(n: usize, eps: f64) -> Result<TailBound> {
    let mut best = None;
    let mut k = 1;
    while cube_le(k, n) {
        if let Ok(value) = bound_tail(n, eps, k) {
            best = Some(TailBound {
                k,
                value,
                vacuous: value > 1.0,
            });
        }
        k += 1;
    }
    best.ok_or_else(|| Error::Hypothesis(format!("no admissible k for N = {n}, eps = {eps}")))
}

/// Empirical `P(l_max ≥ 2v(1+eps))` against the optimal tail bound.
pub fn check_tail(
    spec: &EnsembleSpec,
    eps: f64,
    trials: u64,
    method: NormMethod,
) -> Result<BoundReport> {
    let tb = min_over_k(spec.n, eps)?;
    let p = tail_probability(spec, eps, trials, method)?;
    let point = BoundPoint::monte_carlo(
        spec.n,
        spec.band_param(),
        tb.k,
        spec.v,
        p.value,
        p.stderr,
        trials,
        tb.value,
    );
    Ok(BoundReport::new("tail_bound", vec![point]))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BandMode {
    /// Exact Wick summation (small `N` and `k` only).
    Exact,
    /// Monte Carlo over `trials` samples. `sites = Some(m)` estimates each
    /// trace from `m` stratified diagonal entries instead of full products.
    MonteCarlo {
        trials: u64,
        master_seed: u64,
        sites: Option<usize>,
    },
}

/// Band moment bound `M_2k^{(N,b)} ≤ (1 + 4k³/b²)^k m_2k`, hypothesis `2k ≤ b^{1/3}`.
pub fn check_band_moment_bound(
    n: usize,
    b: usize,
    v: f64,
    ks: &[usize],
    mode: BandMode,
) -> Result<BoundReport> {
    if let Some(&k) = ks.iter().find(|&&k| !cube_le(2 * k, b)) {
        return Err(Error::Hypothesis(format!(
            "2k = {} exceeds b^(1/3) for b = {b}",
            2 * k
        )));
    }
    band_bound(n, b, v, ks, mode)
}

/// As [`check_band_moment_bound`] but evaluates points outside the
/// hypothesis too, marking them with `within_hypothesis = false`.
pub fn check_band_moment_bound_any(
    n: usize,
    b: usize,
    v: f64,
    ks: &[usize],
    mode: BandMode,
) -> Result<BoundReport> {
    band_bound(n, b, v, ks, mode)
}

fn band_bound(n: usize, b: usize, v: f64, ks: &[usize], mode: BandMode) -> Result<BoundReport> {
    if b == 0 || b > n {
        return Err(Error::invalid(format!(
            "band parameter b = {b} must satisfy 1 <= b <= N = {n}"
        )));
    }
    let vq = exact_v(v)?;
    let b2 = int(b * b);
    let rhs_exact = |k: usize| {
        let factor = BigRational::one() + int(4 * k * k * k) / &b2;
        num_traits::pow(factor, k) * catalan_closed_form(k, &vq)
    };
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let mut points = Vec::with_capacity(ks.len());
    match mode {
        BandMode::Exact => {
            for &k in ks {
                let lhs = wick_band_moment(k, n, b, &vq)?;
                points.push(BoundPoint::exact(n, Some(b), k, v, &lhs, &rhs_exact(k)));
            }
        }
        BandMode::MonteCarlo {
            trials,
            master_seed,
            sites,
        } => {
            let spec = EnsembleSpec::band(n, b, v, master_seed);
            let m = match sites {
                Some(s) => mc_moments_sampled_sites(&spec, 2 * k_max, trials, s)?,
                None => mc_moments(&spec, 2 * k_max, trials)?,
            };
            for &k in ks {
                let mv = m.get(2 * k).expect("order computed");
                let se = mv.stderr().unwrap_or(0.0);
                points.push(BoundPoint::monte_carlo(
                    n,
                    Some(b),
                    k,
                    v,
                    mv.value(),
                    se,
                    trials,
                    to_f64(&rhs_exact(k)),
                ));
            }
        }
    }
    for (p, &k) in points.iter_mut().zip(ks) {
        p.within_hypothesis = cube_le(2 * k, b);
    }
    Ok(BoundReport::new("band_moment_bound", points))
}

/// `Σ_{j=1}^{2k−3} (2k−2−j)·j = Σ_{i=1}^{k−1} (2i−1)² < (2k−2)³/2`,
/// by direct integer summation. Passes iff the equality and the strict
/// inequality both hold.
pub fn check_sum_inequality(k: usize) -> Result<BoundReport> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    let m = 2 * k as u128 - 2;
    let lhs: u128 = (1..m).map(|j| (m - j) * j).sum();
    let odd_squares: u128 = (1..k as u128).map(|i| (2 * i - 1) * (2 * i - 1)).sum();
    let twice_rhs = m * m * m;
    let lhs_q = BigRational::from_integer(BigInt::from(lhs));
    let rhs_q = BigRational::new(BigInt::from(twice_rhs), BigInt::from(2));
    let mut p = BoundPoint::exact(0, None, k, 1.0, &lhs_q, &rhs_q);
    p.pass = lhs == odd_squares && 2 * lhs < twice_rhs;
    Ok(BoundReport::new("sum_inequality", vec![p]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gue_moment_bound_examples() {
        let r = check_gue_moment_bound(64, &rat(1, 2), &[1, 2]).unwrap();
        assert!(r.passed());
        assert_eq!(r.points[1].lhs_exact.as_deref(), Some("8193/65536"));
        let r = check_gue_moment_bound(1000, &rat(1, 1), &(1..=10).collect::<Vec<_>>()).unwrap();
        assert!(r.passed());
        assert!(check_gue_moment_bound(64, &rat(1, 1), &[5]).is_err());
        assert!(check_gue_moment_bound(3, &rat(1, 1), &[1]).is_err());
    }

    #[test]
    fn hz_examples() {
        let r = check_hz_bounds(10, &[1, 2]).unwrap();
        assert!(r.cubic.passed() && r.power.passed());
        assert_eq!(r.cubic.points[1].lhs_exact.as_deref(), Some("201/1600"));
        // k = 1 margin is exactly k³/(4N²)·m_2
        assert!((r.cubic.points[0].margin - 0.25 / 400.0).abs() < 1e-18);
        assert!(r.implied_constant > 0.0);
    }

    #[test]
    fn tail_bound_arithmetic() {
        assert!((bound_tail(1000, 0.2, 10).unwrap() - 1000.0 / 1.2f64.powi(10)).abs() < 1e-9);
        assert!(bound_tail(1000, 0.2, 9).is_ok());
        assert!(bound_tail(1000, 0.2, 11).is_err());
        assert!(bound_tail(1000, -0.1, 2).is_err());
        assert!(bound_tail(8, 0.01, 2).is_err());
        let tb = min_over_k(1000, 0.2).unwrap();
        assert_eq!(tb.k, 10);
        assert!(tb.vacuous);
        for n in [100, 1000] {
            for k in 1..4 {
                assert!(bound_tail(n, 0.5, k + 1).unwrap() < bound_tail(n, 0.5, k).unwrap());
                assert!(bound_tail(n + 1, 0.5, k).unwrap() > bound_tail(n, 0.5, k).unwrap());
            }
        }
    }

    #[test]
    fn band_exact_small() {
        let r = check_band_moment_bound(12, 8, 1.0, &[1], BandMode::Exact).unwrap();
        assert!(r.passed());
        assert!(check_band_moment_bound(12, 7, 1.0, &[1], BandMode::Exact).is_err());
        let r = check_band_moment_bound_any(12, 7, 1.0, &[1], BandMode::Exact).unwrap();
        assert!(!r.points[0].within_hypothesis);
    }

    #[test]
    fn sum_inequality_examples() {
        let r = check_sum_inequality(2).unwrap();
        assert!(r.passed());
        assert_eq!((r.points[0].lhs, r.points[0].rhs), (1.0, 4.0));
        let r = check_sum_inequality(3).unwrap();
        assert_eq!((r.points[0].lhs, r.points[0].rhs), (10.0, 32.0));
        for k in 2..=50 {
            assert!(check_sum_inequality(k).unwrap().passed());
        }
        assert!(check_sum_inequality(1).is_err());
    }
}
