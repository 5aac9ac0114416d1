//! Exact sampling of the least-squares tail estimator through the Rényi
//! representation of exponential order statistics.
//!
//! For Pareto data `k_(i) = ln(x_(i)/xm)` has the law of
//! `(1/beta) sum_{j<=i} Z_j / (n - j + 1)` with `Z_j` i.i.d. unit exponentials.
//! Substituting into the OLS estimator gives `OLS1 = factor * beta`, where the
//! factor depends on `n` and the `Z_j` only. Everything here works with
//! `beta = 1` and scales afterwards.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{ols_raw, ols_slope_sorted};
use crate::ks::{two_sample_test, TwoSampleTest};
use crate::montecarlo::unit_cutoff_pareto_sample;
use crate::rng::{derive_seed, rng_from_seed, unit_exponential};

/// One draw of the estimator's random factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenyiDraw {
    pub n: usize,
    pub factor: f64,
}

impl RenyiDraw {
    /// The estimate the draw stands for when the true exponent is `beta`.
    pub fn beta_hat(&self, beta: f64) -> f64 {
        self.factor * beta
    }
}

/// Partial sums `k_(i) = sum_{j<=i} Z_j / (n - j + 1)` for given exponentials.
pub fn order_logs_from_exponentials(z: &[f64]) -> Vec<f64> {
    let n = z.len();
    z.iter()
        .enumerate()
        .scan(0.0, |acc, (j, &zj)| {
            *acc += zj / (n - j) as f64;
            Some(*acc)
        })
        .collect()
}

/// Ordered unit-rate exponential log-ratios for sample size `n`.
pub fn renyi_order_logs(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let z: Vec<f64> = (0..n).map(|_| unit_exponential(&mut rng)).collect();
    order_logs_from_exponentials(&z)
}

/// `sum k_(i) ln(n/(n-i+1)) / sum k_(i)^2` for fixed exponentials.
pub fn factor_from_exponentials(z: &[f64]) -> Result<f64> {
    if z.len() < 2 {
        return Err(Error::TooFewPoints {
            what: "Rényi factor",
            needed: 2,
            got: z.len(),
        });
    }
    ols_slope_sorted(&order_logs_from_exponentials(z))
}

pub fn renyi_ols_factor(n: usize, seed: u64) -> Result<RenyiDraw> {
    if n < 2 {
        return Err(Error::TooFewPoints {
            what: "Rényi factor",
            needed: 2,
            got: n,
        });
    }
    let factor = ols_slope_sorted(&renyi_order_logs(n, seed))?;
    Ok(RenyiDraw { n, factor })
}

/// `draws` independent factors; draw `i` uses its own derived seed, so the
/// result does not depend on the parallel schedule.
pub fn renyi_batch(n: usize, draws: usize, seed: u64) -> Result<Vec<RenyiDraw>> {
    (0..draws as u64)
        .into_par_iter()
        .map(|i| renyi_ols_factor(n, derive_seed(seed, &[n as u64, i])))
        .collect()
}

/// Writes draws as CSV with header `draw_index,factor,beta_hat`.
pub fn write_draws_csv<W: Write>(draws: &[RenyiDraw], beta: f64, out: W) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        draw_index: usize,
        factor: f64,
        beta_hat: f64,
    }
    let mut w = csv::Writer::from_writer(out);
    for (i, d) in draws.iter().enumerate() {
        w.serialize(Row {
            draw_index: i,
            factor: d.factor,
            beta_hat: d.beta_hat(beta),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// OLS1 estimates computed the long way: Pareto data, empirical tail,
/// least-squares slope.
pub fn direct_ols_batch(n: usize, beta: f64, draws: usize, seed: u64) -> Result<Vec<f64>> {
    (0..draws as u64)
        .into_par_iter()
        .map(|i| {
            let s = unit_cutoff_pareto_sample(beta, n, derive_seed(seed, &[n as u64, i]))?;
            ols_raw(&s).map(|r| r.beta_hat)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub beta: f64,
    pub draws: usize,
    pub direct_mean: f64,
    pub renyi_mean: f64,
    #[serde(flatten)]
    pub test: TwoSampleTest,
}

/// Compares direct-sampling OLS1 estimates with Rényi-pipeline estimates by a
/// two-sample KS test at significance 0.01.
pub fn renyi_vs_direct(n: usize, beta: f64, draws: usize, seed: u64) -> Result<EquivalenceReport> {
    if n < 2 {
        return Err(Error::TooFewPoints {
            what: "Rényi comparison sample size",
            needed: 2,
            got: n,
        });
    }
    if draws < 100 {
        return Err(Error::TooFewPoints {
            what: "Rényi comparison draws",
            needed: 100,
            got: draws,
        });
    }
    // distinct streams for the two pipelines
    let direct = direct_ols_batch(n, beta, draws, derive_seed(seed, &[0xD1]))?;
    let renyi: Vec<f64> = renyi_batch(n, draws, derive_seed(seed, &[0x7E]))?
        .iter()
        .map(|d| d.beta_hat(beta))
        .collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(EquivalenceReport {
        n,
        beta,
        draws,
        direct_mean: mean(&direct),
        renyi_mean: mean(&renyi),
        test: two_sample_test(&direct, &renyi, 0.01),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ks::two_sample_test;

    #[test]
    fn order_logs_nondecreasing() {
        for seed in 0..50 {
            let k = renyi_order_logs(30, seed);
            assert_eq!(k.len(), 30);
            assert!(k[0] >= 0.0);
            assert!(k.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn single_order_log_is_unit_exponential() {
        let reps = 100_000u64;
        let mean = (0..reps)
            .map(|i| renyi_order_logs(1, derive_seed(3, &[i]))[0])
            .sum::<f64>()
            / reps as f64;
        // standard error is 1/sqrt(1e5) ~ 0.003
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn largest_order_log_matches_minimum_of_uniforms() {
        // exp(-k_(n)) is the smallest of n uniforms
        let n = 100;
        let reps = 3000u64;
        let renyi: Vec<f64> = (0..reps)
            .map(|i| (-renyi_order_logs(n, derive_seed(5, &[i]))[n - 1]).exp())
            .collect();
        let mut rng = rng_from_seed(17);
        let direct: Vec<f64> = (0..reps)
            .map(|_| {
                (0..n)
                    .map(|_| crate::rng::open_closed_unit(&mut rng))
                    .fold(1.0, f64::min)
            })
            .collect();
        let t = two_sample_test(&renyi, &direct, 0.01);
        assert!(t.accepted, "{t:?}");
    }

    #[test]
    fn fixed_draw_hand_value() {
        // Z = (1, 1): k = (1/2, 3/2), factor = (3/2 ln 2) / (5/2)
        let f = factor_from_exponentials(&[1.0, 1.0]).unwrap();
        assert!((f - 0.6 * 2f64.ln()).abs() < 1e-15);
        assert!((f - 0.41589).abs() < 1e-5);
        assert_eq!(order_logs_from_exponentials(&[1.0, 1.0]), vec![0.5, 1.5]);
    }

    #[test]
    fn rejects_small_n() {
        assert!(renyi_ols_factor(1, 0).is_err());
        assert!(factor_from_exponentials(&[1.0]).is_err());
        assert!(renyi_vs_direct(1, 1.0, 200, 0).is_err());
        assert!(renyi_vs_direct(5, 1.0, 99, 0).is_err());
    }

    #[test]
    fn beta_scaling_is_linear() {
        for seed in 0..20 {
            let d = renyi_ols_factor(17, seed).unwrap();
            assert!(d.factor > 0.0);
            assert_eq!(d.beta_hat(3.0), 2.0 * d.beta_hat(1.5));
        }
    }

    #[test]
    fn batch_is_deterministic() {
        let a = renyi_batch(10, 64, 9).unwrap();
        let b = renyi_batch(10, 64, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn draws_csv() {
        let draws = [
            RenyiDraw { n: 2, factor: 0.5 },
            RenyiDraw { n: 2, factor: 0.25 },
        ];
        let mut buf = Vec::new();
        write_draws_csv(&draws, 2.0, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "draw_index,factor,beta_hat\n0,0.5,1.0\n1,0.25,0.5\n"
        );
    }

    #[test]
    fn matches_direct_pipeline_small_n() {
        for (n, beta) in [(2, 1.0), (100, 1.5)] {
            let r = renyi_vs_direct(n, beta, 5000, 1).unwrap();
            assert!(r.test.accepted, "{r:?}");
        }
    }

    #[test]
    fn renyi_self_comparison() {
        let a: Vec<f64> = renyi_batch(50, 2000, 1)
            .unwrap()
            .iter()
            .map(|d| d.factor)
            .collect();
        let b: Vec<f64> = renyi_batch(50, 2000, 2)
            .unwrap()
            .iter()
            .map(|d| d.factor)
            .collect();
        assert!(two_sample_test(&a, &b, 0.01).accepted);
    }

    #[test]
    fn mean_at_n_1000_tracks_sigmoid() {
        let draws = renyi_batch(1000, 5000, 12).unwrap();
        let mean = draws.iter().map(|d| d.beta_hat(1.5)).sum::<f64>() / draws.len() as f64;
        let r = crate::estimators::sigmoid_factor(1000, &Default::default()).unwrap();
        assert!((mean / (r * 1.5) - 1.0).abs() < 0.02, "{mean}");
    }
}
