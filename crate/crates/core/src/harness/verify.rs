use super::commands::RunOptions;
use super::config::ExperimentConfig;
use super::table::{format_float, Cell, Table};
use crate::bounds::{
    check_band_moment_bound, check_band_moment_bound_any, check_gue_moment_bound, check_hz_bounds,
    check_sum_inequality, check_tail, BandMode, BoundReport, Provenance,
};
use crate::ensembles::{Ensemble, EnsembleSpec};
use crate::estimators::{
    cov_d2, d2_recursion_residual, ibp_residual, mc_moments, site_moment, site_moment_residual,
    Estimate, MCEstimate,
};
use crate::exact::{
    harer_zagier_moments, semicircle_moments, to_f64, wick_band_moment, wick_band_order,
    wick_gue_order, MomentSequence,
};
use crate::linalg::NormMethod;
use crate::{Error, Result};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Suite {
    Bounds,
    Identities,
    #[default]
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "BOUNDS" => Ok(Suite::Bounds),
            "IDENTITIES" => Ok(Suite::Identities),
            "ALL" => Ok(Suite::All),
            other => Err(Error::Config(format!("unknown suite {other:?}"))),
        }
    }
}

pub const VERIFY_COLUMNS: [&str; 10] = [
    "suite",
    "check",
    "params",
    "lhs",
    "rhs",
    "margin",
    "stderr",
    "provenance",
    "pass",
    "note",
];

/// Direct comparisons use 3 standard errors, differences of estimates 4.
const Z_DIRECT: f64 = 3.0;
const Z_DIFF: f64 = 4.0;

pub struct VerifyOutcome {
    pub table: Table,
    pub report: String,
    pub passed: bool,
}

struct Collector {
    table: Table,
    failures: Vec<String>,
    checks: usize,
}

impl Collector {
    fn bound(&mut self, r: &BoundReport) {
        for p in &r.points {
            let mut params = format!("N={};k={};v={}", p.n, p.k, p.v);
            if let Some(b) = p.b {
                params = format!("N={};b={b};k={};v={}", p.n, p.k, p.v);
            }
            let (stderr, prov) = match p.provenance {
                Provenance::Exact => (None, "EXACT"),
                Provenance::MonteCarlo { stderr, .. } => (Some(stderr), "MC"),
            };
            let note = if p.within_hypothesis {
                ""
            } else {
                "outside hypothesis"
            };
            self.row(
                "BOUNDS", &r.id, params, p.lhs, p.rhs, p.margin, stderr, prov, p.pass, note,
            );
        }
    }

    /// `|estimate − target| ≤ z·stderr`; margin is `z·stderr − |diff|`.
    fn mc(&mut self, check: &str, params: String, e: &MCEstimate, target: f64, z: f64) {
        let margin = z * e.stderr - (e.value - target).abs();
        let pass = margin >= 0.0;
        self.row(
            "IDENTITIES",
            check,
            params,
            e.value,
            target,
            margin,
            Some(e.stderr),
            "MC",
            pass,
            &format!("{z} SE"),
        );
    }

    fn exact_zero(&mut self, check: &str, params: String, r: &BigRational) {
        let pass = r.is_zero();
        let v = to_f64(r);
        self.row(
            "IDENTITIES",
            check,
            params,
            v,
            0.0,
            -v.abs(),
            None,
            "EXACT",
            pass,
            "",
        );
    }

    #[allow(clippy::too_many_arguments)]
    fn row(
        &mut self,
        suite: &str,
        check: &str,
        params: String,
        lhs: f64,
        rhs: f64,
        margin: f64,
        stderr: Option<f64>,
        prov: &str,
        pass: bool,
        note: &str,
    ) {
        self.checks += 1;
        if !pass {
            self.failures.push(format!(
                "FAIL {check} [{params}] lhs={} rhs={} margin={}",
                format_float(lhs),
                format_float(rhs),
                format_float(margin)
            ));
        }
        self.table.push(vec![
            Cell::text(suite),
            Cell::text(check),
            Cell::text(params),
            Cell::Float(lhs),
            Cell::Float(rhs),
            Cell::Float(margin),
            Cell::opt_float(stderr),
            Cell::text(prov),
            Cell::text(if pass { "true" } else { "false" }),
            Cell::text(note),
        ]);
    }
}

/// Runs the bound sweeps and the Monte Carlo identity checks.
///
/// The bound grid takes `N` from `N_list` and `k = 1..=k_max/2`; a grid
/// point with `k³ > N` is a configuration error. Identity checks run at
/// fixed small sizes with `trials` samples each.
pub fn verify(cfg: &ExperimentConfig, suite: Suite, opts: &RunOptions) -> Result<VerifyOutcome> {
    cfg.validate()?;
    let mut c = Collector {
        table: Table::new(&VERIFY_COLUMNS),
        failures: vec![],
        checks: 0,
    };
    if suite != Suite::Identities {
        bounds_suite(cfg, opts, &mut c)?;
    }
    if suite != Suite::Bounds {
        identities_suite(cfg, opts, &mut c)?;
    }
    let passed = c.failures.is_empty();
    let mut report = format!(
        "{} checks, {} failed: {}\n",
        c.checks,
        c.failures.len(),
        if passed { "PASS" } else { "FAIL" }
    );
    for f in &c.failures {
        report.push_str(f);
        report.push('\n');
    }
    Ok(VerifyOutcome {
        table: c.table,
        report,
        passed,
    })
}

fn bounds_suite(cfg: &ExperimentConfig, opts: &RunOptions, c: &mut Collector) -> Result<()> {
    let ks: Vec<usize> = (1..=cfg.k_max / 2).collect();
    for &n in &cfg.n_list {
        if let Some(k) = ks.iter().find(|&&k| (k * k * k) > n) {
            return Err(Error::Config(format!(
                "bound grid point k = {k} exceeds N^(1/3) for N = {n}; lower k_max or raise N"
            )));
        }
        if n < 4 {
            return Err(Error::Config(format!("bound grid needs N >= 4, got {n}")));
        }
    }
    let v =
        BigRational::from_float(cfg.v).ok_or_else(|| Error::Config("v is not finite".into()))?;
    for &n in &cfg.n_list {
        c.bound(&check_gue_moment_bound(n, &v, &ks)?);
        let hz = check_hz_bounds(n, &ks)?;
        c.bound(&hz.cubic);
        c.bound(&hz.power);
    }
    for k in 2..=50 {
        c.bound(&check_sum_inequality(k)?);
    }
    for n in 1..=12 {
        for b in 1..=n {
            c.bound(&check_band_moment_bound_any(
                n,
                b,
                cfg.v,
                &[1],
                BandMode::Exact,
            )?);
        }
    }
    match cfg.ensemble {
        Ensemble::Gue => {
            for &n in cfg.n_list.iter().filter(|&&n| n <= 256) {
                let spec = EnsembleSpec::gue(n, cfg.v, cfg.master_seed)
                    .with_diagonal_scale(opts.diagonal_scale);
                for &eps in &cfg.eps_list {
                    c.bound(&check_tail(&spec, eps, cfg.trials, NormMethod::Full)?);
                }
            }
        }
        Ensemble::Band => {
            for p in cfg.grid() {
                let b = p.b.expect("band grid point");
                let admissible: Vec<usize> =
                    (1..=cfg.k_max / 2).filter(|k| 8 * k * k * k <= b).collect();
                if admissible.is_empty() {
                    continue;
                }
                let mode = BandMode::MonteCarlo {
                    trials: cfg.trials.max(2),
                    master_seed: cfg.master_seed,
                    sites: (b > 128).then_some(64),
                };
                c.bound(&check_band_moment_bound(p.n, b, cfg.v, &admissible, mode)?);
            }
        }
        Ensemble::Goe => {}
    }
    Ok(())
}

fn identities_suite(cfg: &ExperimentConfig, opts: &RunOptions, c: &mut Collector) -> Result<()> {
    let t = cfg.trials.max(3);
    let v = cfg.v;
    let v2 = v * v;
    let seed = cfg.master_seed;
    let fault = opts.diagonal_scale;
    let gue = |n: usize| EnsembleSpec::gue(n, v, seed).with_diagonal_scale(fault);
    let band = |n: usize, b: usize| EnsembleSpec::band(n, b, v, seed).with_diagonal_scale(fault);

    // integration by parts, five index tuples per l
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1b9_0000);
    let spec = gue(8);
    for l in 1..=3 {
        for _ in 0..5 {
            let idx = (
                rng.random_range(0..8),
                rng.random_range(0..8),
                rng.random_range(0..8),
                rng.random_range(0..8),
            );
            let r = ibp_residual(&spec, idx, l, t)?;
            let params = format!("N=8;l={l};xyst={:?}", idx);
            c.mc(
                "ibp_residual_re",
                params.clone(),
                &r.residual_re,
                0.0,
                Z_DIFF,
            );
            c.mc("ibp_residual_im", params, &r.residual_im, 0.0, Z_DIFF);
        }
    }

    let spec = gue(10);
    let n2 = 100.0;
    for (a1, a2, target) in [(1, 1, v2 / n2), (2, 2, 2.0 * v2 * v2 / n2), (1, 2, 0.0)] {
        let e = cov_d2(&spec, a1, a2, t)?;
        c.mc(
            "cov_d2",
            format!("N=10;a1={a1};a2={a2}"),
            &e,
            target,
            Z_DIRECT,
        );
    }

    let spec = gue(8);
    for (a1, a2) in [(2, 2), (2, 1), (4, 2), (3, 1)] {
        let r = d2_recursion_residual(&spec, a1, a2, t)?;
        c.mc(
            "d2_recursion_residual",
            format!("N=8;a1={a1};a2={a2}"),
            &r.residual,
            0.0,
            Z_DIFF,
        );
    }

    let spec = band(64, 16);
    for x in [0, 31] {
        let r = site_moment_residual(&spec, x, 1, t)?;
        c.mc(
            "site_moment_residual",
            format!("N=64;b=16;k=1;x={x}"),
            &r,
            0.0,
            Z_DIFF,
        );
    }
    for k in [1, 3] {
        let s = site_moment(&spec, 31, k, t)?;
        c.mc(
            "odd_site_moment",
            format!("N=64;b=16;k={k};x=31"),
            &s.at_x,
            0.0,
            Z_DIFF,
        );
        c.mc(
            "odd_site_bracket",
            format!("N=64;b=16;k={k};x=31"),
            &s.bracket_x,
            0.0,
            Z_DIFF,
        );
    }

    // odd orders: Monte Carlo and exact
    let vq = BigRational::from_float(v).ok_or_else(|| Error::Config("v is not finite".into()))?;
    for (name, spec) in [
        ("GUE", gue(16)),
        (
            "GOE",
            EnsembleSpec::goe(16, v, seed).with_diagonal_scale(fault),
        ),
        ("BAND", band(12, 6)),
    ] {
        let m = mc_moments(&spec, 7, t)?;
        for p in [1, 3, 5, 7] {
            let e = to_estimate(&m, p, t, &spec);
            c.mc(
                "odd_moment",
                format!("{name};N={};order={p}", spec.n),
                &e,
                0.0,
                Z_DIFF,
            );
        }
    }
    for p in [1, 3, 5] {
        c.exact_zero(
            "odd_exact_gue",
            format!("N=5;order={p}"),
            &wick_gue_order(p, 5, &vq)?.moment,
        );
        c.exact_zero(
            "odd_exact_band",
            format!("N=6;b=4;order={p}"),
            &wick_band_order(p, 6, 4, &vq)?,
        );
        c.exact_zero(
            "odd_exact_hz",
            format!("N=5;order={p}"),
            harer_zagier_moments(3, 5, &vq).exact(p),
        );
        c.exact_zero(
            "odd_exact_limit",
            format!("order={p}"),
            semicircle_moments(3, &vq).exact(p),
        );
    }

    // Monte Carlo against the exact oracles
    for n in [4, 16] {
        let spec = gue(n);
        let m = mc_moments(&spec, 4, t)?;
        let hz = harer_zagier_moments(2, n, &vq);
        for p in [2, 4] {
            let e = to_estimate(&m, p, t, &spec);
            c.mc(
                "mc_vs_harer_zagier",
                format!("N={n};order={p}"),
                &e,
                hz.value(p),
                Z_DIFF,
            );
        }
    }
    for b in [4, 8] {
        let spec = band(12, b);
        let m = mc_moments(&spec, 4, t)?;
        for k in [1, 2] {
            let e = to_estimate(&m, 2 * k, t, &spec);
            let exact = to_f64(&wick_band_moment(k, 12, b, &vq)?);
            c.mc(
                "mc_vs_band_wick",
                format!("N=12;b={b};order={}", 2 * k),
                &e,
                exact,
                Z_DIFF,
            );
        }
    }
    Ok(())
}

fn to_estimate(m: &MomentSequence, p: usize, t: u64, spec: &EnsembleSpec) -> MCEstimate {
    MCEstimate::new(
        Estimate {
            value: m.value(p),
            stderr: m.get(p).and_then(|x| x.stderr()).unwrap_or(0.0),
        },
        t,
        spec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_suite_passes_and_rejects_large_k() {
        let cfg =
            ExperimentConfig::from_toml_str("N_list = [64]\ntrials = 200\nk_max = 8").unwrap();
        let out = verify(&cfg, Suite::Bounds, &RunOptions::default()).unwrap();
        assert!(out.passed, "{}", out.report);
        let bad = ExperimentConfig::from_toml_str("N_list = [8]\nk_max = 8").unwrap();
        assert!(verify(&bad, Suite::Bounds, &RunOptions::default()).is_err());
    }
}
