//! Reproducible samplers for the GUE, GOE and band ensembles.
//!
//! Every matrix is a pure function of `(spec, trial)`: the trial index is
//! mixed with the master seed into a 64-bit trial seed, which seeds a ChaCha
//! stream consumed in a fixed row-major order over the upper triangle.

mod sampler;

pub use sampler::{
    sample, sample_band, sample_from_seed, sample_goe, sample_gue, trial_seed, Sample,
};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Ensemble {
    Gue,
    Goe,
    Band,
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::Gue => "GUE",
            Ensemble::Goe => "GOE",
            Ensemble::Band => "BAND",
        })
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GUE" => Ok(Ensemble::Gue),
            "GOE" => Ok(Ensemble::Goe),
            "BAND" => Ok(Ensemble::Band),
            other => Err(Error::invalid(format!("unknown ensemble {other:?}"))),
        }
    }
}

/// Which ensemble to draw from and with what parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: Ensemble,
    pub n: usize,
    /// Entry scale; off-diagonal entries have variance `v²/N` (GUE, GOE) or
    /// `v²/b` inside the band.
    pub v: f64,
    /// Band parameter, used by [`Ensemble::Band`] only.
    pub b: usize,
    pub master_seed: u64,
    /// Fault-injection hook: multiplies the diagonal scale `v` by this
    /// factor. Always 1 outside of mutation tests.
    #[serde(default = "one")]
    pub diagonal_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl EnsembleSpec {
    pub fn gue(n: usize, v: f64, master_seed: u64) -> Self {
        Self::new(Ensemble::Gue, n, v, 0, master_seed)
    }

    pub fn goe(n: usize, v: f64, master_seed: u64) -> Self {
        Self::new(Ensemble::Goe, n, v, 0, master_seed)
    }

    pub fn band(n: usize, b: usize, v: f64, master_seed: u64) -> Self {
        Self::new(Ensemble::Band, n, v, b, master_seed)
    }

    pub fn new(kind: Ensemble, n: usize, v: f64, b: usize, master_seed: u64) -> Self {
        EnsembleSpec {
            kind,
            n,
            v,
            b,
            master_seed,
            diagonal_scale: 1.0,
        }
    }

    pub fn with_diagonal_scale(mut self, s: f64) -> Self {
        self.diagonal_scale = s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("N must be positive"));
        }
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(Error::invalid(format!(
                "v must be positive, got {}",
                self.v
            )));
        }
        if self.kind == Ensemble::Band && !(1..=self.n).contains(&self.b) {
            return Err(Error::invalid(format!(
                "band parameter b = {} must satisfy 1 <= b <= N = {}",
                self.b, self.n
            )));
        }
        Ok(())
    }

    /// `b` for band specs, `None` otherwise.
    pub fn band_param(&self) -> Option<usize> {
        (self.kind == Ensemble::Band).then_some(self.b)
    }
}

/// Variance profile `Ψ_xy = ψ((x−y)/b)/b` with `ψ(t) = 1` for `|t| ≤ 1/2`.
pub fn band_profile(x: usize, y: usize, b: usize) -> f64 {
    if in_band(x, y, b) {
        1.0 / b as f64
    } else {
        0.0
    }
}

/// `|x − y| ≤ b/2`, boundary inclusive.
#[inline]
pub fn in_band(x: usize, y: usize, b: usize) -> bool {
    2 * x.abs_diff(y) <= b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_values() {
        assert_eq!(band_profile(1, 1, 10), 0.1);
        assert_eq!(band_profile(1, 7, 10), 0.0);
        assert_eq!(band_profile(1, 6, 10), 0.1);
        assert_eq!(band_profile(6, 1, 10), 0.1);
        assert_eq!(band_profile(0, 1, 1), 0.0);
        assert_eq!(band_profile(0, 1, 3), 1.0 / 3.0);
    }

    #[test]
    fn spec_validation() {
        assert!(EnsembleSpec::band(10, 0, 1.0, 0).validate().is_err());
        assert!(EnsembleSpec::band(10, 11, 1.0, 0).validate().is_err());
        assert!(EnsembleSpec::band(10, 10, 1.0, 0).validate().is_ok());
        assert!(EnsembleSpec::gue(10, 0.0, 0).validate().is_err());
        assert!(EnsembleSpec::gue(0, 1.0, 0).validate().is_err());
        // b is ignored outside the band ensemble
        assert!(EnsembleSpec::new(Ensemble::Goe, 4, 1.0, 99, 0)
            .validate()
            .is_ok());
    }

    #[test]
    fn ensemble_names_round_trip() {
        for e in [Ensemble::Gue, Ensemble::Goe, Ensemble::Band] {
            assert_eq!(e.to_string().parse::<Ensemble>().unwrap(), e);
        }
        assert!("wishart".parse::<Ensemble>().is_err());
    }
}
