use serde::Serialize;

/// Sorted eigenvalues of one matrix together with derived quantities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSummary {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `max |λ|`.
    pub l_max: f64,
    /// `Σλ − Tr M`.
    pub trace_residual: f64,
}

impl SpectrumSummary {
    /// `eigenvalues` need not be sorted; `trace` is the source matrix trace.
    pub fn new(mut eigenvalues: Vec<f64>, trace: f64) -> Self {
        eigenvalues.sort_by(|a, b| a.total_cmp(b));
        let l_max = match (eigenvalues.first(), eigenvalues.last()) {
            (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
            _ => 0.0,
        };
        let trace_residual = eigenvalues.iter().sum::<f64>() - trace;
        SpectrumSummary {
            eigenvalues,
            l_max,
            trace_residual,
        }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Normalised counting function `#{λ_j ≤ l} / n`.
    pub fn empirical_cdf(&self, l: f64) -> f64 {
        let count = self.eigenvalues.partition_point(|&x| x <= l);
        count as f64 / self.n() as f64
    }

    /// `(1/n) Σ λ^p` for `p = 0..=max_power`.
    pub fn power_means(&self, max_power: usize) -> Vec<f64> {
        let n = self.n() as f64;
        let mut sums = vec![0.0; max_power + 1];
        for &l in &self.eigenvalues {
            let mut t = 1.0;
            for s in sums.iter_mut() {
                *s += t;
                t *= l;
            }
        }
        sums.iter_mut().for_each(|s| *s /= n);
        sums
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_basics() {
        let s = SpectrumSummary::new(vec![0.5, -3.0, 2.0], -0.5);
        assert_eq!(s.eigenvalues, vec![-3.0, 0.5, 2.0]);
        assert_eq!(s.l_max, 3.0);
        assert_eq!(s.trace_residual, 0.0);
        assert_eq!(s.empirical_cdf(0.5), 2.0 / 3.0);
        assert_eq!(s.empirical_cdf(-10.0), 0.0);
        let p = s.power_means(2);
        assert_eq!(p[0], 1.0);
        assert!((p[2] - (9.0 + 0.25 + 4.0) / 3.0).abs() < 1e-15);
    }
}
