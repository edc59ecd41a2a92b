//! Lanczos iteration with full re-orthogonalisation for the largest
//! algebraic eigenvalue of a hermitian operator.

use super::eigen::{tridiagonal_eigenvalues, tridiagonal_eigenvector};
use super::HermitianOperator;
use crate::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    /// Step cap; the Krylov dimension never exceeds the operator size.
    pub max_steps: usize,
    /// Converged when the Ritz residual is at most `tol · |θ|`.
    pub tol: f64,
    /// Ritz values are extracted every `check_every` steps.
    pub check_every: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            max_steps: 300,
            tol: 1e-8,
            check_every: 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOutcome {
    /// Best Ritz value for the top of the spectrum.
    pub eigenvalue: f64,
    /// `β_m · |s_m|`, the Ritz residual norm.
    pub residual: f64,
    pub steps: usize,
    pub converged: bool,
}

/// `−A` for an operator `A`.
pub struct Negated<'a, T: ?Sized>(pub &'a T);

impl<T: HermitianOperator + ?Sized> HermitianOperator for Negated<'_, T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.0.apply(x, y);
        y.iter_mut().for_each(|t| *t = -*t);
    }

    fn to_dense(&self) -> crate::linalg::HermitianMatrix {
        self.0.to_dense().scaled(-1.0)
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter()
        .zip(b)
        .fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Deterministic gaussian start vector depending only on the dimension.
fn start_vector(n: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_705e_ed00 ^ n as u64);
    let mut v: Vec<C64> = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect();
    let s = norm(&v);
    v.iter_mut().for_each(|t| *t /= s);
    v
}

pub fn largest_eigenvalue<A: HermitianOperator + ?Sized>(
    op: &A,
    opts: &LanczosOptions,
) -> LanczosOutcome {
    let n = op.dim();
    let limit = opts.max_steps.min(n).max(1);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(limit);
    let mut alpha: Vec<f64> = Vec::with_capacity(limit);
    let mut beta: Vec<f64> = Vec::with_capacity(limit);
    basis.push(start_vector(n));
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut best = LanczosOutcome {
        eigenvalue: f64::NEG_INFINITY,
        residual: f64::INFINITY,
        steps: 0,
        converged: false,
    };
    for j in 0..limit {
        op.apply(&basis[j], &mut w);
        if j > 0 {
            let b = beta[j - 1];
            for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= qi * b;
            }
        }
        let a = dot(&basis[j], &w).re;
        for (wi, qi) in w.iter_mut().zip(&basis[j]) {
            *wi -= qi * a;
        }
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= qi * c;
                }
            }
        }
        let b = norm(&w);
        let scale = alpha
            .iter()
            .chain(&beta)
            .fold(0.0f64, |m, t| m.max(t.abs()));
        let exhausted = b <= 1e-13 * scale.max(f64::MIN_POSITIVE) || j + 1 == limit;
        if (j + 1) % opts.check_every == 0 || exhausted {
            let vals = match tridiagonal_eigenvalues(alpha.clone(), beta.clone()) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let theta = *vals.last().unwrap();
            let s = tridiagonal_eigenvector(&alpha, &beta, theta);
            let residual = b * s.last().unwrap().abs();
            best = LanczosOutcome {
                eigenvalue: theta,
                residual,
                steps: j + 1,
                converged: residual <= opts.tol * theta.abs() || b <= 1e-13 * scale,
            };
            if best.converged || exhausted {
                // a full Krylov space is exact even if the residual test is
                // dominated by rounding
                if j + 1 == n {
                    best.converged = true;
                }
                return best;
            }
        }
        beta.push(b);
        let next: Vec<C64> = w.iter().map(|t| t / b).collect();
        basis.push(next);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianMatrix;

    #[test]
    fn diagonal_operator() {
        let d: Vec<f64> = (0..40).map(|i| (i as f64) * 0.1 - 1.0).collect();
        let m = HermitianMatrix::from_real_diagonal(&d);
        let out = largest_eigenvalue(&m, &LanczosOptions::default());
        assert!(out.converged);
        assert!((out.eigenvalue - 2.9).abs() < 1e-8, "{out:?}");
        let neg = largest_eigenvalue(&Negated(&m), &LanczosOptions::default());
        assert!((neg.eigenvalue - 1.0).abs() < 1e-8);
    }

    #[test]
    fn small_operator_uses_full_space() {
        let m =
            HermitianMatrix::from_real(3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]).unwrap();
        let out = largest_eigenvalue(&m, &LanczosOptions::default());
        assert!(out.converged);
        assert!((out.eigenvalue - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    }
}
