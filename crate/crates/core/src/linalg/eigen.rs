//! Dense symmetric/hermitian eigenvalues: Householder reduction to a real
//! symmetric tridiagonal matrix followed by implicit-shift QL.
//!
//! Two routes exist for complex hermitian input. [`EigenRoute::Direct`]
//! reduces the complex matrix with complex reflectors. [`EigenRoute::RealEmbedding`]
//! solves the real symmetric `2N × 2N` matrix `[[A, −B], [B, A]]` built from
//! `H = A + iB`, whose spectrum is that of `H` with every eigenvalue doubled.
//! Real input always takes the real path.

use super::hermitian::HermitianMatrix;
use super::spectrum::SpectrumSummary;
use crate::{Error, Result, C64};

/// Relative gap allowed between the two copies of each eigenvalue on the
/// embedding route.
pub const PAIR_GAP_TOL: f64 = 1e-8;

/// Sweeps allowed per eigenvalue before the QL iteration gives up.
pub const QL_MAX_SWEEPS: usize = 60;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EigenRoute {
    #[default]
    Direct,
    RealEmbedding,
}

/// All eigenvalues, ascending, by the default route.
pub fn eigenvalues(m: &HermitianMatrix) -> Result<SpectrumSummary> {
    eigenvalues_with(m, EigenRoute::default())
}

pub fn eigenvalues_with(m: &HermitianMatrix, route: EigenRoute) -> Result<SpectrumSummary> {
    let n = m.n();
    let vals = if m.is_real() {
        let a: Vec<f64> = m.as_slice().iter().map(|z| z.re).collect();
        symmetric_eigenvalues(n, a)?
    } else {
        match route {
            EigenRoute::Direct => {
                let (d, e) = tridiagonalize_hermitian(n, m.as_slice().to_vec());
                tridiagonal_eigenvalues(d, e)?
            }
            EigenRoute::RealEmbedding => embedded_eigenvalues(m)?,
        }
    };
    Ok(SpectrumSummary::new(vals, m.trace()))
}

/// Eigenvalues of a real symmetric matrix (row-major; only the lower
/// triangle is read).
pub fn symmetric_eigenvalues(n: usize, a: Vec<f64>) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: a.len(),
        });
    }
    let (d, e) = tridiagonalize_real(n, a);
    tridiagonal_eigenvalues(d, e)
}

fn embedded_eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    let n = m.n();
    let nn = 2 * n;
    let mut a = vec![0.0; nn * nn];
    for x in 0..n {
        for y in 0..n {
            let z = m.get(x, y);
            a[x * nn + y] = z.re;
            a[(x + n) * nn + (y + n)] = z.re;
            a[x * nn + (y + n)] = -z.im;
            a[(x + n) * nn + y] = z.im;
        }
    }
    let doubled = symmetric_eigenvalues(nn, a)?;
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    for (i, pair) in doubled.chunks_exact(2).enumerate() {
        let gap = (pair[1] - pair[0]).abs();
        if gap >= PAIR_GAP_TOL * scale {
            return Err(Error::NoConvergence { index: i });
        }
        out.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(out)
}

/// Householder reduction of a real symmetric matrix, lower triangle only.
/// Returns the diagonal and sub-diagonal of the similar tridiagonal matrix.
pub fn tridiagonalize_real(n: usize, mut a: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        d[k] = a[k * n + k];
        let m = n - k - 1;
        let off = k + 1;
        for i in 0..m {
            v[i] = a[(off + i) * n + k];
        }
        let sigma: f64 = v[1..m].iter().map(|t| t * t).sum();
        let x0 = v[0];
        if sigma == 0.0 {
            e[k] = x0;
            continue;
        }
        let norm = (x0 * x0 + sigma).sqrt();
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        v[0] = x0 - alpha;
        let tau = 2.0 / (v[0] * v[0] + sigma);
        e[k] = alpha;

        // p = tau · A22 v using the lower triangle
        p[..m].iter_mut().for_each(|t| *t = 0.0);
        for i in 0..m {
            let row = &a[(off + i) * n + off..(off + i) * n + off + i];
            let vi = v[i];
            let mut acc = 0.0;
            for (j, &aij) in row.iter().enumerate() {
                acc += aij * v[j];
                p[j] += aij * vi;
            }
            p[i] += acc + a[(off + i) * n + off + i] * vi;
        }
        let mut pv = 0.0;
        for i in 0..m {
            p[i] *= tau;
            pv += p[i] * v[i];
        }
        let kk = 0.5 * tau * pv;
        for i in 0..m {
            p[i] -= kk * v[i]; // p now holds w
        }
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[(off + i) * n + off..(off + i) * n + off + i + 1];
            for (j, aij) in row.iter_mut().enumerate() {
                *aij -= vi * p[j] + wi * v[j];
            }
        }
    }
    if n > 0 {
        d[n - 1] = a[(n - 1) * n + n - 1];
    }
    (d, e)
}

/// Householder reduction of a complex hermitian matrix (lower triangle read).
/// The returned sub-diagonal holds magnitudes, which is all the spectrum
/// depends on.
pub fn tridiagonalize_hermitian(n: usize, mut a: Vec<C64>) -> (Vec<f64>, Vec<f64>) {
    let zero = C64::new(0.0, 0.0);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(1) {
        d[k] = a[k * n + k].re;
        let m = n - k - 1;
        let off = k + 1;
        for i in 0..m {
            v[i] = a[(off + i) * n + k];
        }
        let sigma: f64 = v[1..m].iter().map(|t| t.norm_sqr()).sum();
        let x0 = v[0];
        if sigma == 0.0 {
            e[k] = x0.norm();
            continue;
        }
        let x0abs = x0.norm();
        let norm = (x0abs * x0abs + sigma).sqrt();
        let phase = if x0abs > 0.0 {
            x0 / x0abs
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        v[0] = x0 - alpha;
        let tau = 2.0 / (v[0].norm_sqr() + sigma);
        e[k] = norm;

        p[..m].iter_mut().for_each(|t| *t = zero);
        for i in 0..m {
            let base = (off + i) * n + off;
            let row = &a[base..base + i];
            let vi = v[i];
            let mut acc = zero;
            for (j, &aij) in row.iter().enumerate() {
                acc += aij * v[j];
                p[j] += aij.conj() * vi;
            }
            p[i] += acc + a[base + i].re * vi;
        }
        let mut pv = zero;
        for i in 0..m {
            p[i] *= tau;
            pv += v[i].conj() * p[i];
        }
        let kk = 0.5 * tau * pv.re;
        for i in 0..m {
            p[i] -= v[i] * kk;
        }
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let base = (off + i) * n + off;
            let row = &mut a[base..base + i + 1];
            for (j, aij) in row.iter_mut().enumerate() {
                *aij -= vi * p[j].conj() + wi * v[j].conj();
            }
        }
    }
    if n > 0 {
        d[n - 1] = a[(n - 1) * n + n - 1].re;
    }
    (d, e)
}

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with
/// diagonal `d` and sub-diagonal `e`, by implicit-shift QL.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    debug_assert_eq!(e.len(), n - 1);
    let mut e: Vec<f64> = e.into_iter().chain(std::iter::once(0.0)).collect();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Unit eigenvector of the tridiagonal `(d, e)` for an (accurate) eigenvalue
/// estimate `theta`, by inverse iteration with a pivoted tridiagonal solve.
pub fn tridiagonal_eigenvector(d: &[f64], e: &[f64], theta: f64) -> Vec<f64> {
    let n = d.len();
    let scale = d
        .iter()
        .chain(e)
        .fold(0.0f64, |m, t| m.max(t.abs()))
        .max(f64::MIN_POSITIVE);
    let shift = theta + 1e-13 * scale;
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..3 {
        x = solve_shifted_tridiagonal(d, e, shift, &x, scale);
        let norm = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        x.iter_mut().for_each(|t| *t /= norm);
    }
    x
}

/// Solves `(T − shift·I) x = rhs` by Gaussian elimination with partial
/// pivoting; row swaps give the factor a second super-diagonal.
fn solve_shifted_tridiagonal(
    d: &[f64],
    e: &[f64],
    shift: f64,
    rhs: &[f64],
    scale: f64,
) -> Vec<f64> {
    let n = d.len();
    let tiny = f64::EPSILON * scale;
    let guard = |p: f64| if p.abs() < tiny { tiny.copysign(p) } else { p };
    let mut diag: Vec<f64> = d.iter().map(|t| t - shift).collect();
    let mut low = e.to_vec();
    let mut up = e.to_vec();
    let mut up2 = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        if diag[i].abs() >= low[i].abs() {
            let f = low[i] / guard(diag[i]);
            diag[i + 1] -= f * up[i];
            b[i + 1] -= f * b[i];
        } else {
            let f = diag[i] / low[i];
            diag[i] = low[i];
            let t = diag[i + 1];
            diag[i + 1] = up[i] - f * t;
            up[i] = t;
            if i + 1 < n - 1 {
                up2[i] = up[i + 1];
                up[i + 1] = -f * up2[i];
            }
            let t = b[i];
            b[i] = b[i + 1];
            b[i + 1] = t - f * b[i];
        }
        low[i] = 0.0;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= up[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= up2[i] * x[i + 2];
        }
        x[i] = s / guard(diag[i]);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_sorted() {
        let m = HermitianMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        assert_eq!(eigenvalues(&m).unwrap().eigenvalues, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_y() {
        let m = HermitianMatrix::from_entries(
            2,
            vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)],
        )
        .unwrap();
        for route in [EigenRoute::Direct, EigenRoute::RealEmbedding] {
            let s = eigenvalues_with(&m, route).unwrap();
            assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
            assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn one_by_one() {
        let m = HermitianMatrix::from_real_diagonal(&[-4.5]);
        assert_eq!(eigenvalues(&m).unwrap().eigenvalues, vec![-4.5]);
    }

    #[test]
    fn known_tridiagonal() {
        // path graph on 5 vertices: 2cos(kπ/6)
        let d = vec![0.0; 5];
        let e = vec![1.0; 4];
        let got = tridiagonal_eigenvalues(d, e).unwrap();
        for (k, g) in got.iter().rev().enumerate() {
            let want = 2.0 * (((k + 1) as f64) * std::f64::consts::PI / 6.0).cos();
            assert!((g - want).abs() < 1e-13, "{g} vs {want}");
        }
    }

    #[test]
    fn tridiagonal_vector_is_eigenvector() {
        let d = vec![1.0, -0.5, 2.0, 0.3, 0.0, 1.5];
        let e = vec![0.7, 1.1, -0.4, 0.9, 0.2];
        let vals = tridiagonal_eigenvalues(d.clone(), e.clone()).unwrap();
        for &theta in &vals {
            let x = tridiagonal_eigenvector(&d, &e, theta);
            let n = d.len();
            let mut res: f64 = 0.0;
            for i in 0..n {
                let mut t = (d[i] - theta) * x[i];
                if i > 0 {
                    t += e[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    t += e[i] * x[i + 1];
                }
                res = res.max(t.abs());
            }
            assert!(res < 1e-10, "theta={theta} res={res}");
        }
    }

    #[test]
    fn routes_agree_on_complex_matrix() {
        let m = HermitianMatrix::from_upper(9, |x, y| {
            c(
                ((x * 7 + y * 3) % 5) as f64 - 2.0,
                ((x + 2 * y) % 3) as f64 - 1.0,
            )
        });
        let a = eigenvalues_with(&m, EigenRoute::Direct).unwrap();
        let b = eigenvalues_with(&m, EigenRoute::RealEmbedding).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-11, "{x} vs {y}");
        }
    }
}
