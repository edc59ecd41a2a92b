use super::hermitian::HermitianMatrix;
use crate::{Error, Result, C64};

/// Hermitian band matrix stored by upper diagonals.
///
/// Entry `(x, y)` is nonzero only when `|x − y| ≤ halfwidth` with
/// `halfwidth = ⌊b/2⌋` (clipped to `n − 1`). Diagonal `d` holds the `n − d`
/// entries `(x, x + d)`; the lower triangle is implied by conjugation.
#[derive(Clone, Debug, PartialEq)]
pub struct BandMatrix {
    n: usize,
    b: usize,
    halfwidth: usize,
    diags: Vec<Vec<C64>>,
}

/// Half bandwidth implied by the band parameter `b`.
pub fn halfwidth_for(b: usize) -> usize {
    b / 2
}

impl BandMatrix {
    pub fn zeros(n: usize, b: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix size must be positive"));
        }
        if b == 0 {
            return Err(Error::invalid("band parameter b must be positive"));
        }
        let halfwidth = halfwidth_for(b).min(n - 1);
        let diags = (0..=halfwidth)
            .map(|d| vec![C64::new(0.0, 0.0); n - d])
            .collect();
        Ok(BandMatrix {
            n,
            b,
            halfwidth,
            diags,
        })
    }

    /// Fills the stored upper band from `f(x, y)`, called in row-major order
    /// over `x ≤ y ≤ x + halfwidth`. Diagonal imaginary parts are dropped.
    pub fn from_upper(n: usize, b: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut m = Self::zeros(n, b)?;
        for x in 0..n {
            let top = (x + m.halfwidth).min(n - 1);
            for y in x..=top {
                let mut v = f(x, y);
                if x == y {
                    v.im = 0.0;
                }
                m.diags[y - x][x] = v;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn b(&self) -> usize {
        self.b
    }

    #[inline]
    pub fn halfwidth(&self) -> usize {
        self.halfwidth
    }

    /// Upper diagonal at offset `d`: entries `(x, x + d)`.
    pub fn diagonal(&self, d: usize) -> &[C64] {
        &self.diags[d]
    }

    pub fn get(&self, x: usize, y: usize) -> C64 {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let d = hi - lo;
        if d > self.halfwidth {
            return C64::new(0.0, 0.0);
        }
        let v = self.diags[d][lo];
        if x <= y {
            v
        } else {
            v.conj()
        }
    }

    pub fn densify(&self) -> HermitianMatrix {
        HermitianMatrix::from_upper(self.n, |x, y| self.get(x, y))
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for d in out.diags.iter_mut() {
            for z in d.iter_mut() {
                *z *= c;
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// `y = M x`, touching only the stored diagonals.
    pub(crate) fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        let n = self.n;
        for (yi, (a, xi)) in y.iter_mut().zip(self.diags[0].iter().zip(x)) {
            *yi = a * xi;
        }
        for d in 1..=self.halfwidth {
            let diag = &self.diags[d];
            let len = n - d;
            // upper: y[x] += a[x] x[x+d]
            for ((yi, a), xs) in y[..len].iter_mut().zip(diag).zip(&x[d..]) {
                *yi += a * xs;
            }
            // lower: y[x+d] += conj(a[x]) x[x]
            for ((yi, a), xs) in y[d..].iter_mut().zip(diag).zip(&x[..len]) {
                *yi += a.conj() * xs;
            }
        }
    }

    pub fn trace(&self) -> f64 {
        self.diags[0].iter().map(|z| z.re).sum()
    }

    /// `y[lo'..=hi'] = (M x)` where `x` vanishes outside `lo..=hi`; returns
    /// the support `(lo', hi')` of the result. Entries of `y` outside it are
    /// left untouched.
    fn matvec_window(&self, x: &[C64], (lo, hi): (usize, usize), y: &mut [C64]) -> (usize, usize) {
        let n = self.n;
        let w = self.halfwidth;
        let (olo, ohi) = (lo.saturating_sub(w), (hi + w).min(n - 1));
        y[olo..=ohi].fill(C64::new(0.0, 0.0));
        for r in lo..=hi {
            y[r] = self.diags[0][r] * x[r];
        }
        for d in 1..=w {
            let diag = &self.diags[d];
            // upper: y[r] += a[r] x[r+d], r + d in lo..=hi
            if hi >= d {
                for r in lo.saturating_sub(d)..=hi - d {
                    y[r] += diag[r] * x[r + d];
                }
            }
            // lower: y[c+d] += conj(a[c]) x[c]
            for c in lo..=hi.min(n.saturating_sub(d + 1)) {
                y[c + d] += diag[c].conj() * x[c];
            }
        }
        (olo, ohi)
    }

    /// `(M^p)_xx` for `p = 0..=max_power`, from the Krylov vectors `M^j e_x`.
    /// Costs `O(p²·w²)` instead of a full band product.
    pub fn site_power_diagonal(&self, x: usize, max_power: usize) -> Vec<f64> {
        let top = max_power.div_ceil(2);
        let mut vecs = vec![vec![C64::new(0.0, 0.0); self.n]; top + 1];
        let mut supports = vec![(x, x)];
        vecs[0][x] = C64::new(1.0, 0.0);
        for j in 1..=top {
            let (prev, rest) = vecs.split_at_mut(j);
            let s = self.matvec_window(&prev[j - 1], supports[j - 1], &mut rest[0]);
            supports.push(s);
        }
        (0..=max_power)
            .map(|p| {
                let (i, j) = (p / 2, p - p / 2);
                let (lo, hi) = supports[i];
                (lo..=hi).map(|r| (vecs[i][r].conj() * vecs[j][r]).re).sum()
            })
            .collect()
    }

    pub fn to_general(&self) -> GeneralBand {
        let mut g = GeneralBand::zeros(self.n, self.halfwidth);
        for x in 0..self.n {
            let lo = x.saturating_sub(self.halfwidth);
            let hi = (x + self.halfwidth).min(self.n - 1);
            for y in lo..=hi {
                g.set(x, y, self.get(x, y));
            }
        }
        g
    }

    /// `(1/N)·Tr(M^p)` for `p = 0..=max_power`, exact up to rounding, using
    /// banded products. Cost grows like `N·(p·w)²/2` for the largest power.
    pub fn trace_power_means(&self, max_power: usize) -> Vec<f64> {
        let n = self.n as f64;
        let mut out = vec![1.0];
        if max_power == 0 {
            return out;
        }
        out.push(self.trace() / n);
        if max_power == 1 {
            return out;
        }
        let base = self.to_general();
        let top = max_power.div_ceil(2);
        let mut powers = vec![base.clone()];
        for _ in 1..top {
            let next = powers.last().unwrap().mul_hermitian(&base);
            powers.push(next);
        }
        for p in 2..=max_power {
            let (i, j) = (p / 2, p - p / 2);
            out.push(powers[i - 1].trace_of_product_hermitian(&powers[j - 1]) / n);
        }
        out
    }

    /// Diagonals of `M^j` for `j = 0..=max_power` (`M^0 = I`).
    pub fn power_diagonals(&self, max_power: usize) -> Vec<Vec<f64>> {
        let mut out = vec![vec![1.0; self.n]];
        if max_power == 0 {
            return out;
        }
        let base = self.to_general();
        let mut cur = base.clone();
        out.push(cur.real_diagonal());
        for _ in 2..=max_power {
            cur = cur.mul_hermitian(&base);
            out.push(cur.real_diagonal());
        }
        out
    }
}

/// General banded square matrix with split real/imaginary storage.
///
/// Row `x` stores columns `x − h ..= x + h` contiguously (positions outside
/// `0..n` stay zero). Used for powers of band matrices, which stay banded
/// with the half bandwidth adding up.
#[derive(Clone, Debug)]
pub struct GeneralBand {
    n: usize,
    h: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl GeneralBand {
    pub fn zeros(n: usize, h: usize) -> Self {
        let h = h.min(n.saturating_sub(1));
        let w = 2 * h + 1;
        GeneralBand {
            n,
            h,
            re: vec![0.0; n * w],
            im: vec![0.0; n * w],
        }
    }

    #[inline]
    fn width(&self) -> usize {
        2 * self.h + 1
    }

    #[inline]
    fn idx(&self, x: usize, y: usize) -> usize {
        x * self.width() + (y + self.h - x)
    }

    pub fn halfwidth(&self) -> usize {
        self.h
    }

    pub fn get(&self, x: usize, y: usize) -> C64 {
        if x.abs_diff(y) > self.h {
            return C64::new(0.0, 0.0);
        }
        let i = self.idx(x, y);
        C64::new(self.re[i], self.im[i])
    }

    pub fn set(&mut self, x: usize, y: usize, v: C64) {
        let i = self.idx(x, y);
        self.re[i] = v.re;
        self.im[i] = v.im;
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|x| self.re[self.idx(x, x)]).collect()
    }

    /// `self · rhs` for a product known to be hermitian (e.g. consecutive
    /// powers of one hermitian matrix): only `y ≥ x` is accumulated, the
    /// lower triangle is mirrored.
    pub fn mul_hermitian(&self, rhs: &GeneralBand) -> GeneralBand {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let (ha, hb) = (self.h, rhs.h);
        let mut out = GeneralBand::zeros(n, ha + hb);
        let hc = out.h;
        let (wa, wb, wc) = (self.width(), rhs.width(), out.width());
        for x in 0..n {
            let z_lo = x.saturating_sub(ha);
            let z_hi = (x + ha).min(n - 1);
            let crow = x * wc;
            for z in z_lo..=z_hi {
                let ai = x * wa + (z + ha - x);
                let (ar, aim) = (self.re[ai], self.im[ai]);
                if ar == 0.0 && aim == 0.0 {
                    continue;
                }
                let y_lo = x.max(z.saturating_sub(hb));
                let y_hi = (z + hb).min(n - 1).min(x + hc);
                if y_lo > y_hi {
                    continue;
                }
                let len = y_hi - y_lo + 1;
                let bs = z * wb + (y_lo + hb - z);
                let cs = crow + (y_lo + hc - x);
                let (br, bim) = (&rhs.re[bs..bs + len], &rhs.im[bs..bs + len]);
                let (cr, cim) = out.split_row_mut(cs, len);
                for k in 0..len {
                    cr[k] += ar * br[k] - aim * bim[k];
                    cim[k] += ar * bim[k] + aim * br[k];
                }
            }
        }
        // mirror the strict upper part into the lower triangle
        for x in 0..n {
            let top = (x + hc).min(n - 1);
            for y in x + 1..=top {
                let src = out.idx(x, y);
                let dst = out.idx(y, x);
                out.re[dst] = out.re[src];
                out.im[dst] = -out.im[src];
            }
        }
        out
    }

    fn split_row_mut(&mut self, start: usize, len: usize) -> (&mut [f64], &mut [f64]) {
        (
            &mut self.re[start..start + len],
            &mut self.im[start..start + len],
        )
    }

    /// `Re Tr(self · other)` for hermitian `other`, i.e.
    /// `Re Σ self_xy · conj(other_xy)`.
    pub fn trace_of_product_hermitian(&self, other: &GeneralBand) -> f64 {
        let h = self.h.min(other.h);
        let mut acc = 0.0;
        for x in 0..self.n {
            let lo = x.saturating_sub(h);
            let hi = (x + h).min(self.n - 1);
            let (sa, sb) = (self.idx(x, lo), other.idx(x, lo));
            let len = hi - lo + 1;
            for k in 0..len {
                acc += self.re[sa + k] * other.re[sb + k] + self.im[sa + k] * other.im[sb + k];
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian::matrix_powers;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, b: usize, seed: u64) -> BandMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BandMatrix::from_upper(n, b, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .unwrap()
    }

    #[test]
    fn halfwidth_is_floor_half() {
        assert_eq!(BandMatrix::zeros(10, 10).unwrap().halfwidth(), 5);
        assert_eq!(BandMatrix::zeros(10, 7).unwrap().halfwidth(), 3);
        assert_eq!(BandMatrix::zeros(10, 1).unwrap().halfwidth(), 0);
        assert_eq!(BandMatrix::zeros(3, 10).unwrap().halfwidth(), 2);
        assert!(BandMatrix::zeros(3, 0).is_err());
    }

    #[test]
    fn site_power_diagonal_matches_power_diagonals() {
        for (n, b) in [(12, 6), (30, 7), (5, 5), (40, 1)] {
            let m = random_band(n, b, 5);
            let full = m.power_diagonals(7);
            for x in [0, n / 2, n - 1] {
                let site = m.site_power_diagonal(x, 7);
                for p in 0..=7 {
                    assert!(
                        (site[p] - full[p][x]).abs() < 1e-10 * (1.0 + full[p][x].abs()),
                        "n={n} b={b} x={x} p={p}"
                    );
                }
            }
        }
    }

    #[test]
    fn outside_band_is_zero_and_dense_is_hermitian() {
        let m = random_band(12, 6, 1);
        let d = m.densify();
        d.check_hermitian().unwrap();
        for x in 0..12usize {
            for y in 0..12 {
                if x.abs_diff(y) > 3 {
                    assert_eq!(d.get(x, y), C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn band_matvec_matches_dense() {
        for (n, b, seed) in [(1, 1, 3), (7, 2, 4), (16, 5, 5), (33, 33, 6), (64, 12, 7)] {
            let m = random_band(n, b, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            let x: Vec<C64> = (0..n)
                .map(|_| C64::new(rng.random(), rng.random()))
                .collect();
            let yb = m.matvec(&x).unwrap();
            let yd = m.densify().matvec(&x).unwrap();
            for (a, b) in yb.iter().zip(&yd) {
                assert!((a - b).norm() <= 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn banded_trace_powers_match_dense_powers() {
        for (n, b) in [(9, 4), (20, 6), (13, 26)] {
            let m = random_band(n, b, n as u64);
            let banded = m.trace_power_means(7);
            let dense = matrix_powers(&m.densify(), 7);
            for p in 0..=7 {
                let want = dense[p].trace().re / n as f64;
                assert!(
                    (banded[p] - want).abs() <= 1e-10 * want.abs().max(1.0),
                    "n={n} b={b} p={p}: {} vs {want}",
                    banded[p]
                );
            }
            let diags = m.power_diagonals(4);
            for (j, d) in diags.iter().enumerate() {
                for x in 0..n {
                    assert!((d[x] - dense[j].get(x, x).re).abs() < 1e-10);
                }
            }
        }
    }
}
