use super::config::{ExperimentConfig, GridPoint};
use super::table::{format_float, Cell, Table};
use crate::ensembles::{sample, sample_from_seed, trial_seed, Ensemble, EnsembleSpec, Sample};
use crate::estimators::{ks_distance, mc_moments, LmaxSummary};
use crate::exact::{
    harer_zagier_moments, semicircle_density, semicircle_moments, to_f64, wick_band_order,
    wick_gue_order, MomentSequence, WICK_GUE_MAX_K,
};
use crate::linalg::{
    eigenvalues, spectral_norm_with, HermitianOperator, LanczosOptions, NormMethod,
};
use crate::{par, Error, Result};
use num_rational::BigRational;
use std::str::FromStr;
use std::time::Instant;

/// Spectral-norm method selection for the harness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NormChoice {
    Full,
    Lanczos,
    /// Full eigensolver up to `N = 256`, Lanczos above.
    #[default]
    Auto,
}

impl NormChoice {
    pub fn resolve(self, n: usize) -> NormMethod {
        match self {
            NormChoice::Full => NormMethod::Full,
            NormChoice::Lanczos if n >= 3 => NormMethod::Lanczos,
            NormChoice::Lanczos => NormMethod::Full,
            NormChoice::Auto if n <= 256 => NormMethod::Full,
            NormChoice::Auto => NormMethod::Lanczos,
        }
    }
}

impl FromStr for NormChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(NormChoice::Full),
            "lanczos" => Ok(NormChoice::Lanczos),
            "auto" => Ok(NormChoice::Auto),
            other => Err(Error::Config(format!("unknown norm method {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentMode {
    Exact,
    Mc,
    Wick,
}

impl FromStr for MomentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EXACT" => Ok(MomentMode::Exact),
            "MC" => Ok(MomentMode::Mc),
            "WICK" => Ok(MomentMode::Wick),
            other => Err(Error::Config(format!("unknown moments mode {other:?}"))),
        }
    }
}

/// Options shared by the sampling commands.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub method: NormChoice,
    /// Fill `runtime_ms`; off by default so outputs stay byte-reproducible.
    pub timing: bool,
    /// Diagonal fault-injection factor (1 = correct sampler).
    pub diagonal_scale: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            method: NormChoice::Auto,
            timing: false,
            diagonal_scale: 1.0,
        }
    }
}

fn spec_for(cfg: &ExperimentConfig, p: GridPoint, opts: &RunOptions) -> EnsembleSpec {
    cfg.spec(p).with_diagonal_scale(opts.diagonal_scale)
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub const NORM_SCAN_COLUMNS: [&str; 9] = [
    "experiment",
    "ensemble",
    "N",
    "b",
    "v",
    "trial",
    "seed",
    "lmax",
    "runtime_ms",
];

/// Per-trial spectral norms for every grid point, followed by mean, max
/// and q95 summary rows.
pub fn norm_scan(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Table> {
    cfg.validate()?;
    let mut t = Table::new(&NORM_SCAN_COLUMNS);
    let lanczos = LanczosOptions::default();
    for p in cfg.grid() {
        let spec = spec_for(cfg, p, opts);
        let method = opts.method.resolve(p.n);
        let started = Instant::now();
        let rows = par::try_map_trials(cfg.trials, |trial| {
            let t0 = Instant::now();
            let m = sample(&spec, trial).map_err(|e| e.in_trial(trial))?;
            let norm = spectral_norm_with(&m, method, &lanczos).map_err(|e| e.in_trial(trial))?;
            Ok::<_, Error>((norm, ms(t0)))
        })?;
        let prefix = |trial: Cell, seed: Cell| {
            vec![
                Cell::text("norm-scan"),
                Cell::text(cfg.ensemble.to_string()),
                Cell::Uint(p.n as u64),
                Cell::opt_uint(p.b),
                Cell::Float(cfg.v),
                trial,
                seed,
            ]
        };
        let time = |x: f64| {
            if opts.timing {
                Cell::Float(x)
            } else {
                Cell::Empty
            }
        };
        for (trial, (norm, elapsed)) in rows.iter().enumerate() {
            let mut row = prefix(
                Cell::Uint(trial as u64),
                Cell::Uint(trial_seed(cfg.master_seed, trial as u64)),
            );
            row.extend([Cell::Float(norm.value), time(*elapsed)]);
            t.push(row);
        }
        let unconverged = rows.iter().filter(|(n, _)| !n.converged).count();
        let s = LmaxSummary::from_values(rows.iter().map(|(n, _)| n.value).collect(), unconverged);
        let total = ms(started);
        for (name, value) in [("mean", s.mean), ("max", s.max), ("q95", s.q95)] {
            let mut row = prefix(Cell::text(name), Cell::Empty);
            row.extend([Cell::Float(value), time(total)]);
            t.push(row);
        }
    }
    Ok(t)
}

pub const MOMENTS_COLUMNS: [&str; 11] = [
    "experiment",
    "ensemble",
    "mode",
    "kind",
    "N",
    "b",
    "v",
    "order",
    "value",
    "stderr",
    "exact",
];

fn exact_v(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::Config(format!("v = {v} is not finite")))
}

/// Moment tables. Exact and Wick modes list even orders `0..=k_max` as
/// rationals and decimals; MC lists every order with standard errors.
pub fn moments(cfg: &ExperimentConfig, mode: MomentMode, opts: &RunOptions) -> Result<Table> {
    cfg.validate()?;
    let mut t = Table::new(&MOMENTS_COLUMNS);
    let mode_name = match mode {
        MomentMode::Exact => "EXACT",
        MomentMode::Mc => "MC",
        MomentMode::Wick => "WICK",
    };
    let row = |kind: &str,
               p: Option<GridPoint>,
               order: usize,
               value: f64,
               stderr: Option<f64>,
               exact: Option<&BigRational>| {
        vec![
            Cell::text("moments"),
            Cell::text(cfg.ensemble.to_string()),
            Cell::text(mode_name),
            Cell::text(kind),
            Cell::opt_uint(p.map(|p| p.n)),
            Cell::opt_uint(p.and_then(|p| p.b)),
            Cell::Float(cfg.v),
            Cell::Uint(order as u64),
            Cell::Float(value),
            Cell::opt_float(stderr),
            exact.map_or(Cell::Empty, |r| Cell::text(r.to_string())),
        ]
    };
    let push_exact = |t: &mut Table, kind: &str, p: Option<GridPoint>, m: &MomentSequence| {
        for order in (0..=cfg.k_max).step_by(2) {
            let r = m.exact(order);
            t.push(row(kind, p, order, to_f64(r), None, Some(r)));
        }
    };
    let v = exact_v(cfg.v)?;
    let k_half = cfg.k_max / 2;
    match mode {
        MomentMode::Mc => {
            for p in cfg.grid() {
                let spec = spec_for(cfg, p, opts);
                let m = mc_moments(&spec, cfg.k_max, cfg.trials.max(2))?;
                let kind = if cfg.ensemble == Ensemble::Band {
                    "BAND"
                } else {
                    "FINITE_N"
                };
                for (order, mv) in m.iter() {
                    t.push(row(kind, Some(p), order, mv.value(), mv.stderr(), None));
                }
            }
        }
        MomentMode::Exact | MomentMode::Wick => {
            if cfg.ensemble == Ensemble::Goe {
                return Err(Error::Config("exact GOE moments are not available".into()));
            }
            if mode == MomentMode::Exact {
                push_exact(&mut t, "LIMIT", None, &semicircle_moments(k_half, &v));
            }
            for p in cfg.grid() {
                match (cfg.ensemble, mode) {
                    (Ensemble::Band, _) => {
                        let b = p.b.expect("band grid point");
                        for order in (0..=cfg.k_max).step_by(2) {
                            let r = wick_band_order(order, p.n, b, &v)?;
                            t.push(row("BAND", Some(p), order, to_f64(&r), None, Some(&r)));
                        }
                    }
                    (_, MomentMode::Exact) => {
                        push_exact(
                            &mut t,
                            "FINITE_N",
                            Some(p),
                            &harer_zagier_moments(k_half, p.n, &v),
                        );
                    }
                    _ => {
                        if k_half > WICK_GUE_MAX_K {
                            return Err(Error::Config(format!(
                                "WICK mode enumerates (2k-1)!! matchings and is capped at order {}; k_max = {}",
                                2 * WICK_GUE_MAX_K,
                                cfg.k_max
                            )));
                        }
                        for order in (0..=cfg.k_max).step_by(2) {
                            let r = wick_gue_order(order, p.n, &v)?.moment;
                            t.push(row("FINITE_N", Some(p), order, to_f64(&r), None, Some(&r)));
                        }
                    }
                }
            }
        }
    }
    Ok(t)
}

pub const SEMICIRCLE_COLUMNS: [&str; 12] = [
    "experiment",
    "ensemble",
    "N",
    "b",
    "v",
    "kind",
    "index",
    "lo",
    "hi",
    "center",
    "value",
    "reference",
];

pub const SEMICIRCLE_BINS: usize = 80;

/// Histogram of eigenvalues pooled over the trials on 80 bins over
/// `[−2.5v, 2.5v]` with the semicircle density at each bin centre, per-trial
/// KS distances, and the histogram mass.
pub fn semicircle(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Table> {
    cfg.validate()?;
    let mut t = Table::new(&SEMICIRCLE_COLUMNS);
    let v = cfg.v;
    let (lo, hi) = (-2.5 * v, 2.5 * v);
    let width = (hi - lo) / SEMICIRCLE_BINS as f64;
    for p in cfg.grid() {
        let spec = spec_for(cfg, p, opts);
        let spectra = par::try_map_trials(cfg.trials, |trial| {
            sample(&spec, trial)
                .and_then(|m| eigenvalues(&m.to_dense()))
                .map_err(|e| e.in_trial(trial))
        })?;
        let mut counts = [0u64; SEMICIRCLE_BINS];
        let mut outside = 0u64;
        for s in &spectra {
            for &l in &s.eigenvalues {
                let i = ((l - lo) / width).floor();
                if l < lo || l > hi {
                    outside += 1;
                } else {
                    counts[(i as usize).min(SEMICIRCLE_BINS - 1)] += 1;
                }
            }
        }
        let inside: u64 = counts.iter().sum();
        let base = |kind: &str, index: u64| {
            vec![
                Cell::text("semicircle"),
                Cell::text(cfg.ensemble.to_string()),
                Cell::Uint(p.n as u64),
                Cell::opt_uint(p.b),
                Cell::Float(v),
                Cell::text(kind),
                Cell::Uint(index),
            ]
        };
        let mut mass = 0.0;
        for (i, &c) in counts.iter().enumerate() {
            let (a, b) = (lo + i as f64 * width, lo + (i + 1) as f64 * width);
            let centre = 0.5 * (a + b);
            let density = if inside == 0 {
                0.0
            } else {
                c as f64 / (inside as f64 * width)
            };
            mass += c as f64 / inside.max(1) as f64;
            let mut row = base("hist", i as u64);
            row.extend([
                Cell::Float(a),
                Cell::Float(b),
                Cell::Float(centre),
                Cell::Float(density),
                Cell::Float(semicircle_density(centre, v)),
            ]);
            t.push(row);
        }
        for (trial, s) in spectra.iter().enumerate() {
            let mut row = base("ks", trial as u64);
            row.extend([
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Float(ks_distance(s, v)),
                Cell::Empty,
            ]);
            t.push(row);
        }
        let mut row = base("mass", 0);
        row.extend([
            Cell::Float(lo),
            Cell::Float(hi),
            Cell::Empty,
            Cell::Float(mass),
            Cell::Float(1.0),
        ]);
        t.push(row);
        let mut row = base("outside", 0);
        row.extend([
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Uint(outside),
            Cell::Empty,
        ]);
        t.push(row);
    }
    Ok(t)
}

pub const SAMPLE_COLUMNS: [&str; 10] = [
    "ensemble", "N", "b", "v", "trial", "seed", "x", "y", "re", "im",
];

/// Nonzero-pattern entries of one matrix from the first grid point, either
/// for a trial index or directly from a recorded trial seed.
pub fn sample_matrix(
    cfg: &ExperimentConfig,
    trial: u64,
    seed: Option<u64>,
    opts: &RunOptions,
) -> Result<Table> {
    cfg.validate()?;
    let p = cfg.grid()[0];
    let spec = spec_for(cfg, p, opts);
    let seed = seed.unwrap_or_else(|| trial_seed(cfg.master_seed, trial));
    let m = sample_from_seed(&spec, seed)?;
    let mut t = Table::new(&SAMPLE_COLUMNS);
    let trial_cell = if seed == trial_seed(cfg.master_seed, trial) {
        Cell::Uint(trial)
    } else {
        Cell::Empty
    };
    let n = p.n;
    let w = match &m {
        Sample::Band(bm) => bm.halfwidth(),
        Sample::Dense(_) => n,
    };
    let get = |x: usize, y: usize| match &m {
        Sample::Band(bm) => bm.get(x, y),
        Sample::Dense(d) => d.get(x, y),
    };
    for x in 0..n {
        for y in x.saturating_sub(w)..=(x + w).min(n - 1) {
            let z = get(x, y);
            t.push(vec![
                Cell::text(cfg.ensemble.to_string()),
                Cell::Uint(n as u64),
                Cell::opt_uint(p.b),
                Cell::Float(cfg.v),
                trial_cell.clone(),
                Cell::Uint(seed),
                Cell::Uint(x as u64),
                Cell::Uint(y as u64),
                Cell::Float(z.re),
                Cell::Float(z.im),
            ]);
        }
    }
    Ok(t)
}

/// Short human summary of a norm-scan table's summary rows.
pub fn describe_norm_scan(t: &Table) -> String {
    let (ti, li, ni, bi) = (
        t.column("trial").unwrap(),
        t.column("lmax").unwrap(),
        t.column("N").unwrap(),
        t.column("b").unwrap(),
    );
    let mut out = String::new();
    for r in t.rows.iter().filter(|r| r[ti] == Cell::text("mean")) {
        let show = |c: &Cell| match c {
            Cell::Uint(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            _ => "-".into(),
        };
        out.push_str(&format!(
            "N={} b={} mean lmax={}\n",
            show(&r[ni]),
            show(&r[bi]),
            show(&r[li])
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(s).unwrap()
    }

    #[test]
    fn norm_scan_layout() {
        let c = cfg("N_list = [6, 8]\ntrials = 3\nmaster_seed = 9");
        let t = norm_scan(&c, &RunOptions::default()).unwrap();
        assert_eq!(t.columns, NORM_SCAN_COLUMNS);
        assert_eq!(t.rows.len(), 2 * (3 + 3));
        let csv = t.to_csv();
        assert!(csv.starts_with("experiment,ensemble,N,b,v,trial,seed,lmax,runtime_ms\n"));
        assert!(csv.contains(",mean,,"));
        // the seed column regenerates the matrix
        let seed = match &t.rows[1][6] {
            Cell::Uint(s) => *s,
            _ => panic!(),
        };
        let m = sample_from_seed(&c.spec(c.grid()[0]), seed).unwrap();
        let l = crate::linalg::spectral_norm(&m, NormMethod::Full)
            .unwrap()
            .value;
        assert_eq!(t.rows[1][7], Cell::Float(l));
    }

    #[test]
    fn exact_moments_table() {
        let c = cfg("N_list = [4]\nk_max = 8");
        let t = moments(&c, MomentMode::Exact, &RunOptions::default()).unwrap();
        let limit: Vec<_> = t
            .rows
            .iter()
            .filter(|r| r[3] == Cell::text("LIMIT"))
            .map(|r| r[10].clone())
            .collect();
        assert_eq!(limit, ["1", "1", "2", "5", "14"].map(Cell::text));
        let w = moments(&c, MomentMode::Wick, &RunOptions::default()).unwrap();
        let finite: Vec<_> = t
            .rows
            .iter()
            .filter(|r| r[3] == Cell::text("FINITE_N"))
            .collect();
        assert_eq!(finite.len(), w.rows.len());
        for (a, b) in finite.iter().zip(&w.rows) {
            assert_eq!(a[10], b[10]);
        }
        let too_big = cfg("N_list = [4]\nk_max = 16");
        assert!(moments(&too_big, MomentMode::Wick, &RunOptions::default()).is_err());
        assert!(moments(
            &cfg("ensemble = \"GOE\""),
            MomentMode::Exact,
            &RunOptions::default()
        )
        .is_err());
    }

    #[test]
    fn semicircle_mass_is_one() {
        let c = cfg("N_list = [50]\ntrials = 2");
        let t = semicircle(&c, &RunOptions::default()).unwrap();
        let mass = t.rows.iter().find(|r| r[5] == Cell::text("mass")).unwrap();
        match mass[10] {
            Cell::Float(m) => assert!((m - 1.0).abs() < 1e-12),
            _ => panic!(),
        }
        assert_eq!(
            t.rows.iter().filter(|r| r[5] == Cell::text("hist")).count(),
            80
        );
    }

    #[test]
    fn sample_band_pattern() {
        let c = cfg("ensemble = \"BAND\"\nN_list = [10]\nb_list = [4]");
        let t = sample_matrix(&c, 2, None, &RunOptions::default()).unwrap();
        // rows with |x − y| ≤ 2
        let expect: usize = (0..10usize)
            .map(|x| (0..10usize).filter(|y| x.abs_diff(*y) <= 2).count())
            .sum();
        assert_eq!(t.rows.len(), expect);
        let seed = trial_seed(c.master_seed, 2);
        let again = sample_matrix(&c, 0, Some(seed), &RunOptions::default()).unwrap();
        for (a, b) in t.rows.iter().zip(&again.rows) {
            assert_eq!(a[6..], b[6..]);
        }
    }
}
