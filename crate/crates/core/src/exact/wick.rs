use super::moments::rat;
use crate::ensembles::in_band;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub const WICK_GUE_MAX_K: usize = 7;
pub const WICK_BAND_MAX_K: usize = 3;
pub const WICK_BAND_MAX_N: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct PairingOracleResult {
    pub order: usize,
    pub matchings: u64,
    /// Loop count `C(π)` to number of matchings with that count.
    pub loop_tally: BTreeMap<usize, u64>,
    pub moment: BigRational,
}

/// Visits every perfect matching of `0..m` in canonical order: the smallest
/// unpaired slot is paired with each later unpaired slot in increasing order.
pub fn for_each_matching(m: usize, mut f: impl FnMut(&[(usize, usize)])) {
    if m % 2 == 1 {
        return;
    }
    let mut used = vec![false; m];
    let mut pairs = Vec::with_capacity(m / 2);
    recurse(&mut used, &mut pairs, &mut f);
}

fn recurse(
    used: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
    f: &mut impl FnMut(&[(usize, usize)]),
) {
    let Some(s) = used.iter().position(|u| !u) else {
        f(pairs);
        return;
    };
    used[s] = true;
    for t in s + 1..used.len() {
        if !used[t] {
            used[t] = true;
            pairs.push((s, t));
            recurse(used, pairs, f);
            pairs.pop();
            used[t] = false;
        }
    }
    used[s] = false;
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Index classes of a matching on the trace cycle `H_{i0 i1} H_{i1 i2} ⋯`.
/// Pairing factors `s` and `t` forces `i_s = i_{t+1}` and `i_{s+1} = i_t`.
/// Returns the class label of each index slot, labels `0..C`.
fn index_classes(m: usize, pairs: &[(usize, usize)]) -> Vec<usize> {
    let mut uf = UnionFind::new(m);
    for &(s, t) in pairs {
        uf.union(s, (t + 1) % m);
        uf.union((s + 1) % m, t);
    }
    let mut label = vec![usize::MAX; m];
    let mut out = vec![0; m];
    let mut next = 0;
    for i in 0..m {
        let r = uf.find(i);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        out[i] = label[r];
    }
    out
}

fn pow_n(n: usize, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(n));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

/// `E (1/N) Tr H^{order}` for GUE by summing over all Wick matchings.
pub fn wick_gue_order(order: usize, n: usize, v: &BigRational) -> Result<PairingOracleResult> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if order > 2 * WICK_GUE_MAX_K {
        return Err(Error::PowerCap {
            k: order,
            cap: 2 * WICK_GUE_MAX_K,
        });
    }
    let mut tally = BTreeMap::new();
    let mut count = 0u64;
    for_each_matching(order, |pairs| {
        let classes = index_classes(order, pairs);
        // the empty product still carries one free index
        let c = classes.iter().max().map_or(1, |m| m + 1);
        *tally.entry(c).or_insert(0u64) += 1;
        count += 1;
    });
    let k = (order / 2) as i64;
    let mut moment = BigRational::zero();
    if order % 2 == 0 {
        for (&c, &mult) in &tally {
            moment += pow_n(n, c as i64 - k - 1) * BigInt::from(mult);
        }
        moment *= num_traits::pow(v * v, k as usize);
    }
    Ok(PairingOracleResult {
        order,
        matchings: count,
        loop_tally: tally,
        moment,
    })
}

pub fn wick_gue_moment(k: usize, n: usize, v: &BigRational) -> Result<PairingOracleResult> {
    wick_gue_order(2 * k, n, v)
}

/// `E (1/N) Tr H^{order}` for entries with covariance
/// `E{H_xy H_uv} = δ_xv δ_yu · v² · profile(x, y)`, by summing the Wick
/// expansion over every assignment of indices to loop classes.
pub fn wick_profile_order(
    order: usize,
    n: usize,
    v: &BigRational,
    profile: impl Fn(usize, usize) -> BigRational,
) -> BigRational {
    if order % 2 == 1 || n == 0 {
        return BigRational::zero();
    }
    if order == 0 {
        return BigRational::one();
    }
    let v2 = v * v;
    let mut total = BigRational::zero();
    for_each_matching(order, |pairs| {
        let classes = index_classes(order, pairs);
        let c = classes.iter().max().map_or(0, |m| m + 1);
        let mut assign = vec![0usize; c];
        loop {
            let mut w = BigRational::one();
            for &(s, _) in pairs {
                let x = assign[classes[s]];
                let y = assign[classes[(s + 1) % order]];
                let p = profile(x, y);
                if p.is_zero() {
                    w = p;
                    break;
                }
                w *= &v2 * p;
            }
            total += w;
            // odometer over n^c assignments
            let mut i = 0;
            while i < c {
                assign[i] += 1;
                if assign[i] < n {
                    break;
                }
                assign[i] = 0;
                i += 1;
            }
            if i == c {
                break;
            }
        }
    });
    total / BigRational::from_integer(BigInt::from(n))
}

/// Exact band moment `E (1/N) Tr (H^{(N,b)})^{order}`.
pub fn wick_band_order(order: usize, n: usize, b: usize, v: &BigRational) -> Result<BigRational> {
    if b == 0 || b > n {
        return Err(Error::invalid(format!(
            "band parameter b = {b} must satisfy 1 <= b <= N = {n}"
        )));
    }
    if order > 2 * WICK_BAND_MAX_K {
        return Err(Error::PowerCap {
            k: order,
            cap: 2 * WICK_BAND_MAX_K,
        });
    }
    if n > WICK_BAND_MAX_N {
        return Err(Error::invalid(format!(
            "exact band moments are limited to N <= {WICK_BAND_MAX_N}, got {n}"
        )));
    }
    let inv_b = rat(1, b as i64);
    Ok(wick_profile_order(order, n, v, |x, y| {
        if in_band(x, y, b) {
            inv_b.clone()
        } else {
            BigRational::zero()
        }
    }))
}

pub fn wick_band_moment(k: usize, n: usize, b: usize, v: &BigRational) -> Result<BigRational> {
    wick_band_order(2 * k, n, b, v)
}
