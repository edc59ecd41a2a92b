use super::{Ensemble, EnsembleSpec};
use crate::linalg::{eigenvalues, BandMatrix, HermitianMatrix, HermitianOperator};
use crate::{Error, Result, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the entry stream for one trial.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    mix64(master_seed ^ mix64(trial.wrapping_add(GOLDEN)))
}

struct Gaussians(ChaCha8Rng);

impl Gaussians {
    fn new(seed: u64) -> Self {
        Gaussians(ChaCha8Rng::seed_from_u64(seed))
    }

    #[inline]
    fn next(&mut self) -> f64 {
        StandardNormal.sample(&mut self.0)
    }

    /// `α + iβ` with `α, β` independent of variance `s²/2`.
    #[inline]
    fn complex(&mut self, s: f64) -> C64 {
        let k = s * std::f64::consts::FRAC_1_SQRT_2;
        let re = self.next();
        let im = self.next();
        C64::new(k * re, k * im)
    }
}

/// A sampled matrix in its natural storage.
#[derive(Clone, Debug, PartialEq)]
pub enum Sample {
    Dense(HermitianMatrix),
    Band(BandMatrix),
}

impl Sample {
    pub fn n(&self) -> usize {
        self.dim()
    }

    /// `(1/N)·Tr(H^p)` for `p = 0..=max_power`.
    ///
    /// Dense samples use one eigendecomposition for all powers; band samples
    /// use banded matrix products up to power 8 and the eigenvalues beyond.
    pub fn trace_power_means(&self, max_power: usize) -> Result<Vec<f64>> {
        match self {
            Sample::Dense(m) => Ok(eigenvalues(m)?.power_means(max_power)),
            Sample::Band(m) if max_power <= 8 => Ok(m.trace_power_means(max_power)),
            Sample::Band(m) => Ok(eigenvalues(&m.densify())?.power_means(max_power)),
        }
    }

    pub fn as_dense(&self) -> Option<&HermitianMatrix> {
        match self {
            Sample::Dense(m) => Some(m),
            Sample::Band(_) => None,
        }
    }

    pub fn as_band(&self) -> Option<&BandMatrix> {
        match self {
            Sample::Band(m) => Some(m),
            Sample::Dense(_) => None,
        }
    }
}

impl HermitianOperator for Sample {
    fn dim(&self) -> usize {
        match self {
            Sample::Dense(m) => m.n(),
            Sample::Band(m) => m.n(),
        }
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        match self {
            Sample::Dense(m) => m.apply(x, y),
            Sample::Band(m) => m.apply(x, y),
        }
    }

    fn to_dense(&self) -> HermitianMatrix {
        match self {
            Sample::Dense(m) => m.clone(),
            Sample::Band(m) => m.densify(),
        }
    }
}

fn expect_kind(spec: &EnsembleSpec, kind: Ensemble) -> Result<()> {
    spec.validate()?;
    if spec.kind != kind {
        return Err(Error::invalid(format!(
            "expected a {kind} spec, got {}",
            spec.kind
        )));
    }
    Ok(())
}

pub fn sample_gue(spec: &EnsembleSpec, trial: u64) -> Result<HermitianMatrix> {
    expect_kind(spec, Ensemble::Gue)?;
    Ok(gue_from_seed(spec, trial_seed(spec.master_seed, trial)))
}

pub fn sample_goe(spec: &EnsembleSpec, trial: u64) -> Result<HermitianMatrix> {
    expect_kind(spec, Ensemble::Goe)?;
    Ok(goe_from_seed(spec, trial_seed(spec.master_seed, trial)))
}

pub fn sample_band(spec: &EnsembleSpec, trial: u64) -> Result<BandMatrix> {
    expect_kind(spec, Ensemble::Band)?;
    band_from_seed(spec, trial_seed(spec.master_seed, trial))
}

pub fn sample(spec: &EnsembleSpec, trial: u64) -> Result<Sample> {
    sample_from_seed(spec, trial_seed(spec.master_seed, trial))
}

/// Regenerates a matrix directly from its trial seed.
pub fn sample_from_seed(spec: &EnsembleSpec, seed: u64) -> Result<Sample> {
    spec.validate()?;
    Ok(match spec.kind {
        Ensemble::Gue => Sample::Dense(gue_from_seed(spec, seed)),
        Ensemble::Goe => Sample::Dense(goe_from_seed(spec, seed)),
        Ensemble::Band => Sample::Band(band_from_seed(spec, seed)?),
    })
}

fn gue_from_seed(spec: &EnsembleSpec, seed: u64) -> HermitianMatrix {
    let mut g = Gaussians::new(seed);
    let s = spec.v / (spec.n as f64).sqrt();
    let sd = s * spec.diagonal_scale;
    HermitianMatrix::from_upper(spec.n, |x, y| {
        if x == y {
            C64::new(sd * g.next(), 0.0)
        } else {
            g.complex(s)
        }
    })
}

fn goe_from_seed(spec: &EnsembleSpec, seed: u64) -> HermitianMatrix {
    let mut g = Gaussians::new(seed);
    let s = spec.v / (spec.n as f64).sqrt();
    let sd = s * std::f64::consts::SQRT_2 * spec.diagonal_scale;
    HermitianMatrix::from_upper(spec.n, |x, y| {
        if x == y {
            C64::new(sd * g.next(), 0.0)
        } else {
            C64::new(s * g.next(), 0.0)
        }
    })
}

fn band_from_seed(spec: &EnsembleSpec, seed: u64) -> Result<BandMatrix> {
    let mut g = Gaussians::new(seed);
    let s = spec.v / (spec.b as f64).sqrt();
    let sd = s * spec.diagonal_scale;
    BandMatrix::from_upper(spec.n, spec.b, |x, y| {
        if x == y {
            C64::new(sd * g.next(), 0.0)
        } else {
            g.complex(s)
        }
    })
}
