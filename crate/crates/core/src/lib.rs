//! Spectral norms and moments of Wigner, GUE/GOE and band hermitian random
//! matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense hermitian and banded storage, matvec, trace powers,
//!   a Householder/QL eigensolver and a Lanczos extreme-eigenvalue solver.
//! * [`ensembles`]: reproducible GUE, GOE and band samplers.
//! * [`exact`]: rational-arithmetic moment engines (Catalan, Harer–Zagier,
//!   Wick pairings) and the semicircle density.
//! * [`estimators`]: Monte Carlo estimators with standard errors.
//! * [`bounds`]: exact and statistical checks of the moment and tail bounds.
//! * [`harness`]: configuration, experiment commands and CSV/JSON output used
//!   by the `bandnorm` binary.

pub mod bounds;
pub mod ensembles;
pub mod error;
pub mod estimators;
pub mod exact;
pub mod harness;
pub mod linalg;
pub mod par;

pub use error::{Error, Result};

pub use num_complex::Complex64 as C64;
