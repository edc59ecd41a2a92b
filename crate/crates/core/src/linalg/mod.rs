//! Dense hermitian and banded linear algebra.

pub mod band;
pub mod eigen;
pub mod hermitian;
pub mod lanczos;
pub mod spectrum;

use std::borrow::Cow;

pub use band::{BandMatrix, GeneralBand};
pub use eigen::{eigenvalues, eigenvalues_with, EigenRoute};
pub use hermitian::{matrix_powers, HermitianMatrix, SquareMatrix};
pub use lanczos::{LanczosOptions, LanczosOutcome};
pub use spectrum::SpectrumSummary;

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Default cap on the power accepted by [`trace_power_mean`].
pub const TRACE_POWER_CAP: usize = 64;

/// Tolerance on the imaginary part of a trace power, relative to the bound
/// `max(1, ‖M‖_∞^k)`.
pub const TRACE_IMAG_TOL: f64 = 1e-10;

/// A hermitian linear operator that can also be materialised densely.
pub trait HermitianOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = M x`; `x` and `y` have length `dim()`.
    fn apply(&self, x: &[C64], y: &mut [C64]);
    fn to_dense(&self) -> HermitianMatrix;
}

impl HermitianOperator for HermitianMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.matvec_into(x, y)
    }

    fn to_dense(&self) -> HermitianMatrix {
        self.clone()
    }
}

impl HermitianOperator for BandMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.matvec_into(x, y)
    }

    fn to_dense(&self) -> HermitianMatrix {
        self.densify()
    }
}

/// `M x` for either storage.
pub fn matvec<A: HermitianOperator + ?Sized>(m: &A, x: &[C64]) -> Result<Vec<C64>> {
    if x.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: x.len(),
        });
    }
    let mut y = vec![C64::new(0.0, 0.0); m.dim()];
    m.apply(x, &mut y);
    Ok(y)
}

/// `(1/N)·Tr(M^k)` by repeated multiplication.
pub fn trace_power_mean(m: &HermitianMatrix, k: usize) -> Result<f64> {
    trace_power_mean_capped(m, k, TRACE_POWER_CAP)
}

pub fn trace_power_mean_capped(m: &HermitianMatrix, k: usize, cap: usize) -> Result<f64> {
    if k > cap {
        return Err(Error::PowerCap { k, cap });
    }
    m.check_hermitian()?;
    let n = m.n();
    if k == 0 {
        return Ok(1.0);
    }
    let half = k / 2;
    let powers = matrix_powers(m, k - half);
    let tr = powers[half].trace_of_product(&powers[k - half]) / n as f64;
    let bound = m.max_row_sum().powi(k as i32).max(1.0);
    if tr.im.abs() > TRACE_IMAG_TOL * bound {
        return Err(Error::ImaginaryTrace(tr.im));
    }
    Ok(tr.re)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    /// Full eigendecomposition of the densified matrix.
    #[default]
    Full,
    /// Lanczos on `M` and on `−M`.
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Always true for [`NormMethod::Full`].
    pub converged: bool,
    /// Worst Ritz residual of the two Lanczos runs (0 for full).
    pub residual: f64,
    pub steps: usize,
}

/// `max |λ|` of a hermitian operator.
pub fn spectral_norm<A: HermitianOperator + ?Sized>(
    m: &A,
    method: NormMethod,
) -> Result<NormEstimate> {
    spectral_norm_with(m, method, &LanczosOptions::default())
}

pub fn spectral_norm_with<A: HermitianOperator + ?Sized>(
    m: &A,
    method: NormMethod,
    opts: &LanczosOptions,
) -> Result<NormEstimate> {
    match method {
        NormMethod::Full => {
            let s = eigenvalues(&m.to_dense())?;
            Ok(NormEstimate {
                value: s.l_max,
                converged: true,
                residual: 0.0,
                steps: 0,
            })
        }
        NormMethod::Lanczos => {
            if m.dim() < 3 {
                return Err(Error::invalid("Lanczos needs n >= 3"));
            }
            let top = lanczos::largest_eigenvalue(m, opts);
            let bottom = lanczos::largest_eigenvalue(&lanczos::Negated(m), opts);
            Ok(NormEstimate {
                value: top.eigenvalue.max(bottom.eigenvalue),
                converged: top.converged && bottom.converged,
                residual: top.residual.max(bottom.residual),
                steps: top.steps + bottom.steps,
            })
        }
    }
}

/// Cheap spectrum access for either storage without copying dense input.
pub fn dense_view<A: HermitianOperator + ?Sized>(m: &A) -> Cow<'_, HermitianMatrix> {
    Cow::Owned(m.to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_power_trivial_cases() {
        let m = HermitianMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert_eq!(trace_power_mean(&m, 0).unwrap(), 1.0);
        assert_eq!(trace_power_mean(&m, 2).unwrap(), 1.0);
        assert_eq!(trace_power_mean(&m, 1).unwrap(), 0.0);
        assert!(matches!(
            trace_power_mean(&m, 65),
            Err(Error::PowerCap { k: 65, cap: 64 })
        ));
    }

    #[test]
    fn norm_trivial_cases() {
        let id = HermitianMatrix::identity(5);
        for method in [NormMethod::Full, NormMethod::Lanczos] {
            let r = spectral_norm(&id, method).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12);
        }
        let m = HermitianMatrix::from_real(2, &[0.0, 2.0, 2.0, 0.0]).unwrap();
        assert!((spectral_norm(&m, NormMethod::Full).unwrap().value - 2.0).abs() < 1e-14);
        assert!(spectral_norm(&m, NormMethod::Lanczos).is_err());
    }

    #[test]
    fn norm_of_diagonal_is_max_abs_entry() {
        let m = HermitianMatrix::from_real_diagonal(&[0.5, -7.25, 3.0, 1.0]);
        assert_eq!(spectral_norm(&m, NormMethod::Full).unwrap().value, 7.25);
        let r = spectral_norm(&m, NormMethod::Lanczos).unwrap();
        assert!((r.value - 7.25).abs() < 1e-12);
    }
}
