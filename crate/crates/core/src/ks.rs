//! Kolmogorov-Smirnov statistics: the one-sample distance against a model
//! CDF and the two-sample test.

use serde::Serialize;

/// Large-sample critical value `c(alpha)` of the Kolmogorov distribution:
/// reject when `D > c(alpha) sqrt((n + m) / (n m))`.
pub fn critical_coefficient(alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt()
}

/// Survival function of the Kolmogorov distribution,
/// `Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample statistic for sorted data against a continuous CDF, checking
/// both sides of every jump of the empirical CDF.
pub fn one_sample_distance_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            let above = (k + 1) as f64 / n - f;
            let below = f - k as f64 / n;
            above.abs().max(below.abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample statistic `sup |F_a - F_b|`. Inputs need not be sorted.
pub fn two_sample_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        // step past every copy of x in both samples before comparing
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoSampleTest {
    pub statistic: f64,
    /// Asymptotic p-value with the small-sample correction of Stephens.
    pub p_value: f64,
    pub critical_value: f64,
    pub significance: f64,
    /// Same distribution not rejected at `significance`.
    pub accepted: bool,
}

pub fn two_sample_test(a: &[f64], b: &[f64], significance: f64) -> TwoSampleTest {
    let statistic = two_sample_distance(a, b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ne = na * nb / (na + nb);
    let sq = ne.sqrt();
    let p_value = kolmogorov_survival((sq + 0.12 + 0.11 / sq) * statistic);
    let critical_value = critical_coefficient(significance) / sq;
    TwoSampleTest {
        statistic,
        p_value,
        critical_value,
        significance,
        accepted: p_value > significance,
    }
}
