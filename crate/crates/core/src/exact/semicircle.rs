use std::f64::consts::PI;

/// Semicircle density `√(4v² − l²)/(2πv²)` on `[−2v, 2v]`.
pub fn semicircle_density(l: f64, v: f64) -> f64 {
    let r2 = 4.0 * v * v - l * l;
    if r2 <= 0.0 {
        0.0
    } else {
        r2.sqrt() / (2.0 * PI * v * v)
    }
}

pub fn semicircle_cdf(l: f64, v: f64) -> f64 {
    if l <= -2.0 * v {
        return 0.0;
    }
    if l >= 2.0 * v {
        return 1.0;
    }
    let r = (4.0 * v * v - l * l).max(0.0).sqrt();
    let c = 0.5 + l * r / (4.0 * PI * v * v) + (l / (2.0 * v)).clamp(-1.0, 1.0).asin() / PI;
    c.clamp(0.0, 1.0)
}

/// Inverse of [`semicircle_cdf`] by bisection, accurate to a few ulps of `2v`.
pub fn semicircle_quantile(p: f64, v: f64) -> f64 {
    let (mut lo, mut hi) = (-2.0 * v, 2.0 * v);
    if p <= 0.0 {
        return lo;
    }
    if p >= 1.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if semicircle_cdf(mid, v) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
