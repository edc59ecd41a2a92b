use crate::{Error, Result, C64};

/// Dense `n × n` complex hermitian matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<C64>,
}

/// Relative tolerance used when validating conjugate symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;

impl HermitianMatrix {
    /// Validates and wraps row-major entries.
    pub fn from_entries(n: usize, data: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix size must be positive"));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        let m = HermitianMatrix { n, data };
        m.check_hermitian()?;
        Ok(m)
    }

    /// Builds a matrix from its upper triangle; the lower triangle is the
    /// conjugate mirror and the imaginary part of the diagonal is dropped.
    /// `f` is called in row-major order over `y >= x`.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(n > 0, "matrix size must be positive");
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for x in 0..n {
            data[x * n + x] = C64::new(f(x, x).re, 0.0);
            for y in x + 1..n {
                let v = f(x, y);
                data[x * n + y] = v;
                data[y * n + x] = v.conj();
            }
        }
        HermitianMatrix { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; n])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_upper(diag.len(), |x, y| {
            if x == y {
                C64::new(diag[x], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Real symmetric matrix from row-major entries (validated).
    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_entries(n, data.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> C64 {
        self.data[x * self.n + y]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, x: usize) -> &[C64] {
        &self.data[x * self.n..(x + 1) * self.n]
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute row sum; an upper bound on the spectral norm.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|x| self.row(x).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|x| self.get(x, x).re).sum()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// `max |H_xy - conj(H_yx)|`, diagonal imaginary parts included.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for x in 0..n {
            for y in x..n {
                r = r.max((self.get(x, y) - self.get(y, x).conj()).norm());
            }
        }
        r
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let residual = self.symmetry_residual();
        let tolerance = SYMMETRY_TOL * self.max_abs_entry();
        if residual > tolerance {
            return Err(Error::NotHermitian {
                residual,
                tolerance,
            });
        }
        Ok(())
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

    pub(crate) fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            *out = self
                .row(r)
                .iter()
                .zip(x)
                .fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a * b);
        }
    }

    /// Entrywise multiple `c·H`.
    pub fn scaled(&self, c: f64) -> Self {
        HermitianMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// Unitary conjugation `U H U*`, with `U` given row-major.
    pub fn conjugated_by(&self, u: &SquareMatrix) -> Result<Self> {
        if u.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: u.n(),
            });
        }
        let h = SquareMatrix::from(self);
        let prod = u.mul(&h).mul(&u.adjoint());
        // Rounding leaves a tiny anti-hermitian part; symmetrise it away.
        Ok(Self::from_upper(self.n, |x, y| {
            (prod.get(x, y) + prod.get(y, x).conj()) * 0.5
        }))
    }

    pub fn to_square(&self) -> SquareMatrix {
        SquareMatrix::from(self)
    }
}

/// General dense square complex matrix, used for matrix powers.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<C64>,
}

impl From<&HermitianMatrix> for SquareMatrix {
    fn from(h: &HermitianMatrix) -> Self {
        SquareMatrix {
            n: h.n,
            data: h.data.clone(),
        }
    }
}

impl SquareMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                data.push(f(x, y));
            }
        }
        SquareMatrix { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |x, y| C64::new(if x == y { 1.0 } else { 0.0 }, 0.0))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> C64 {
        self.data[x * self.n + y]
    }

    pub fn set(&mut self, x: usize, y: usize, v: C64) {
        self.data[x * self.n + y] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |x, y| self.get(y, x).conj())
    }

    pub fn mul(&self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for x in 0..n {
            let orow = &mut out[x * n..(x + 1) * n];
            for z in 0..n {
                let a = self.data[x * n + z];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for (o, b) in orow.iter_mut().zip(&rhs.data[z * n..(z + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        SquareMatrix { n, data: out }
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|x| self.get(x, x)).sum()
    }

    /// `Tr(self · rhs)` without forming the product.
    pub fn trace_of_product(&self, rhs: &SquareMatrix) -> C64 {
        let n = self.n;
        let mut acc = C64::new(0.0, 0.0);
        for x in 0..n {
            for y in 0..n {
                acc += self.data[x * n + y] * rhs.data[y * n + x];
            }
        }
        acc
    }
}

/// `[I, H, H², …, H^max_power]` by repeated multiplication.
pub fn matrix_powers(h: &HermitianMatrix, max_power: usize) -> Vec<SquareMatrix> {
    let base = SquareMatrix::from(h);
    let mut out = Vec::with_capacity(max_power + 1);
    out.push(SquareMatrix::identity(h.n()));
    for j in 1..=max_power {
        let next = out[j - 1].mul(&base);
        out.push(next);
    }
    out
}
