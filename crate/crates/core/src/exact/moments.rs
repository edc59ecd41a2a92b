use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

/// `num/den` as a big rational.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MomentKind {
    /// Semicircle limit `m_2k`.
    Limit,
    /// Finite-N GUE moment.
    FiniteN,
    /// Band ensemble moment.
    Band,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MomentValue {
    Exact(BigRational),
    Estimate { value: f64, stderr: f64 },
}

impl MomentValue {
    pub fn value(&self) -> f64 {
        match self {
            MomentValue::Exact(r) => to_f64(r),
            MomentValue::Estimate { value, .. } => *value,
        }
    }

    pub fn stderr(&self) -> Option<f64> {
        match self {
            MomentValue::Exact(_) => None,
            MomentValue::Estimate { stderr, .. } => Some(*stderr),
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            MomentValue::Exact(r) => Some(r),
            MomentValue::Estimate { .. } => None,
        }
    }
}

/// Moments indexed by order `p = 0..=max_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    pub kind: MomentKind,
    pub n: Option<usize>,
    pub b: Option<usize>,
    pub v: f64,
    values: Vec<MomentValue>,
}

impl MomentSequence {
    pub fn new(
        kind: MomentKind,
        n: Option<usize>,
        b: Option<usize>,
        v: f64,
        values: Vec<MomentValue>,
    ) -> Self {
        MomentSequence {
            kind,
            n,
            b,
            v,
            values,
        }
    }

    pub fn max_order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn get(&self, order: usize) -> Option<&MomentValue> {
        self.values.get(order)
    }

    /// Exact value at `order`; panics on estimates or out-of-range orders.
    pub fn exact(&self, order: usize) -> &BigRational {
        self.values[order]
            .exact()
            .expect("moment sequence is not exact")
    }

    pub fn value(&self, order: usize) -> f64 {
        self.values[order].value()
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(|v| v.exact().is_some())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &MomentValue)> {
        self.values.iter().enumerate()
    }
}

fn exact_sequence(
    kind: MomentKind,
    n: Option<usize>,
    even: Vec<BigRational>,
    v: &BigRational,
) -> MomentSequence {
    let mut values = Vec::with_capacity(2 * even.len());
    for (k, m) in even.into_iter().enumerate() {
        if k > 0 {
            values.push(MomentValue::Exact(BigRational::zero()));
        }
        values.push(MomentValue::Exact(m));
    }
    MomentSequence::new(kind, n, None, to_f64(v), values)
}

/// Limit moments `m_0..m_{2 k_max}` from the quadratic recursion.
pub fn semicircle_moments(k_max: usize, v: &BigRational) -> MomentSequence {
    let v2 = v * v;
    let mut m: Vec<BigRational> = vec![BigRational::one()];
    for k in 1..=k_max {
        let mut s = BigRational::zero();
        for j in 0..k {
            s += &m[k - 1 - j] * &m[j];
        }
        m.push(&v2 * s);
    }
    exact_sequence(MomentKind::Limit, None, m, v)
}

/// `v^{2k}·C(2k, k)/(k+1)`.
pub fn catalan_closed_form(k: usize, v: &BigRational) -> BigRational {
    let mut binom = BigInt::one();
    for i in 0..k {
        binom = binom * BigInt::from(2 * k - i) / BigInt::from(i + 1);
    }
    let c = BigRational::new(binom, BigInt::from(k + 1));
    c * num_traits::pow(v * v, k)
}

/// Finite-N GUE moments via the Harer–Zagier three-term recursion.
///
/// The recursion runs at entry variance `1/4` and is rescaled by `(2v)^{2k}`.
pub fn harer_zagier_moments(k_max: usize, n: usize, v: &BigRational) -> MomentSequence {
    assert!(n >= 1, "N must be positive");
    let n2 = BigRational::from_integer(BigInt::from(n) * BigInt::from(n));
    let mut m: Vec<BigRational> = vec![BigRational::one()];
    for k in 1..=k_max {
        let kk = k as i64;
        let a = rat(2 * kk - 1, 2 * kk + 2);
        let mut next = &a * &m[k - 1];
        if k >= 2 {
            let c = &a * rat(2 * kk - 3, 2 * kk) * rat(kk * (kk - 1), 4) / &n2;
            next += c * &m[k - 2];
        }
        m.push(next);
    }
    let four_v2 = rat(4, 1) * v * v;
    let mut scale = BigRational::one();
    for mk in m.iter_mut() {
        *mk *= &scale;
        scale *= &four_v2;
    }
    exact_sequence(MomentKind::FiniteN, Some(n), m, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> BigRational {
        rat(n, 1)
    }

    /// Dyck paths of semilength k by brute force over ±1 sequences.
    fn dyck_count(k: usize) -> u64 {
        let len = 2 * k;
        (0u64..1 << len)
            .filter(|bits| {
                let mut h = 0i64;
                for i in 0..len {
                    h += if bits >> i & 1 == 1 { 1 } else { -1 };
                    if h < 0 {
                        return false;
                    }
                }
                h == 0
            })
            .count() as u64
    }

    #[test]
    fn catalan_values() {
        let m = semicircle_moments(8, &int(1));
        let expect = [1, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (k, e) in expect.iter().enumerate() {
            assert_eq!(m.exact(2 * k), &int(*e));
            assert_eq!(m.exact(2 * k), &int(dyck_count(k) as i64));
        }
        assert_eq!(m.exact(3), &int(0));
        assert_eq!(m.exact(2), &int(1));
    }

    #[test]
    fn closed_form_matches_recursion() {
        for v in [int(1), rat(1, 2), rat(3, 7)] {
            let m = semicircle_moments(30, &v);
            for k in 0..=30 {
                assert_eq!(&catalan_closed_form(k, &v), m.exact(2 * k), "k = {k}");
            }
        }
        assert_eq!(catalan_closed_form(0, &int(5)), int(1));
        assert_eq!(catalan_closed_form(2, &int(1)), int(2));
        assert_eq!(catalan_closed_form(5, &int(1)), int(42));
    }

    #[test]
    fn harer_zagier_low_orders() {
        for n in 1..6usize {
            for v in [int(1), rat(1, 2), rat(2, 3)] {
                let m = harer_zagier_moments(3, n, &v);
                let v2 = &v * &v;
                assert_eq!(m.exact(2), &v2);
                let n2 = int((n * n) as i64);
                let v4 = &v2 * &v2;
                assert_eq!(m.exact(4), &(&v4 * int(2) + &v4 / n2));
                assert_eq!(m.exact(1), &int(0));
            }
        }
        // scalar gaussian: E g^4 = 3
        assert_eq!(harer_zagier_moments(2, 1, &int(1)).exact(4), &int(3));
        // E g^6 = 15
        assert_eq!(harer_zagier_moments(3, 1, &int(1)).exact(6), &int(15));
    }

    #[test]
    fn finite_n_dominates_limit() {
        for n in 1..=8 {
            let hz = harer_zagier_moments(6, n, &int(1));
            let lim = semicircle_moments(6, &int(1));
            for k in 0..=6 {
                assert!(hz.exact(2 * k) >= lim.exact(2 * k));
            }
        }
    }

    #[test]
    fn finite_n_approaches_limit() {
        let lim = to_f64(semicircle_moments(4, &int(1)).exact(8));
        let mut prev = f64::INFINITY;
        for n in [2, 8, 32, 128, 512] {
            let gap = to_f64(harer_zagier_moments(4, n, &int(1)).exact(8)) - lim;
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-3);
    }
}
