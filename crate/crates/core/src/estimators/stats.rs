use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Sample mean and `sd/√T`.
pub fn mean_and_stderr(xs: &[f64]) -> Estimate {
    let t = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / t;
    if xs.len() < 2 {
        return Estimate {
            value: mean,
            stderr: 0.0,
        };
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (t - 1.0);
    Estimate {
        value: mean,
        stderr: (var / t).sqrt(),
    }
}

/// Standard error of a smooth statistic from its per-trial influence values.
pub(crate) fn with_influence(value: f64, influence: &[f64]) -> Estimate {
    Estimate {
        value,
        stderr: mean_and_stderr(influence).stderr,
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample covariance and its per-trial influence values.
pub(crate) fn covariance(x: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    let t = x.len() as f64;
    let (mx, my) = (mean(x), mean(y));
    let prods: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let c = prods.iter().sum::<f64>() / (t - 1.0);
    let infl = prods.into_iter().map(|p| p - c).collect();
    (c, infl)
}

/// Joint third central moment `E{(X−μx)(Y−μy)(Z−μz)}` with influence values.
pub(crate) fn third_central(x: &[f64], y: &[f64], z: &[f64]) -> (f64, Vec<f64>) {
    let t = x.len() as f64;
    let (mx, my, mz) = (mean(x), mean(y), mean(z));
    let (cxy, _) = covariance(x, y);
    let (cxz, _) = covariance(x, z);
    let (cyz, _) = covariance(y, z);
    let prods: Vec<f64> = (0..x.len())
        .map(|i| (x[i] - mx) * (y[i] - my) * (z[i] - mz))
        .collect();
    let d3 = prods.iter().sum::<f64>() * t / ((t - 1.0) * (t - 2.0));
    let infl = (0..x.len())
        .map(|i| prods[i] - d3 - cyz * (x[i] - mx) - cxz * (y[i] - my) - cxy * (z[i] - mz))
        .collect();
    (d3, infl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn mean_and_se_of_constants() {
        let e = mean_and_stderr(&[2.0, 2.0, 2.0]);
        assert_eq!(e.value, 2.0);
        assert_eq!(e.stderr, 0.0);
        let e = mean_and_stderr(&[1.0, 3.0]);
        assert_eq!(e.value, 2.0);
        assert!((e.stderr - 1.0).abs() < 1e-15);
    }

    #[test]
    fn covariance_and_third_moment_of_known_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = 200_000;
        let g: Vec<f64> = (0..t).map(|_| rng.sample(StandardNormal)).collect();
        let h: Vec<f64> = (0..t).map(|_| rng.sample(StandardNormal)).collect();
        let x: Vec<f64> = g.iter().zip(&h).map(|(a, b)| a + 0.5 * b).collect();
        // Cov(g, g + h/2) = 1
        let (c, infl) = covariance(&g, &x);
        let e = with_influence(c, &infl);
        assert!((e.value - 1.0).abs() < 4.0 * e.stderr, "{e:?}");
        // E (g² − 1)^3 = 8 for chi-square with one degree of freedom
        let sq: Vec<f64> = g.iter().map(|a| a * a).collect();
        let (d3, infl) = third_central(&sq, &sq, &sq);
        let e = with_influence(d3, &infl);
        assert!((e.value - 8.0).abs() < 4.0 * e.stderr, "{e:?}");
        // symmetric law: E g³ = 0
        let (d3, infl) = third_central(&g, &g, &g);
        let e = with_influence(d3, &infl);
        assert!(e.value.abs() < 4.0 * e.stderr, "{e:?}");
    }
}
