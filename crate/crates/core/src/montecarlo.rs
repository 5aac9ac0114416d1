//! Replicated estimator experiments on Pareto data with unit cutoff.
//!
//! Each `(n, replication)` cell draws one sample from its own derived seed
//! and evaluates every requested estimator on that same sample, so results
//! are identical however the cells are scheduled across threads.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::pareto_draws;
use crate::empirical::Sample;
use crate::error::{Error, Result};
use crate::estimators::{
    mle_raw, mle_unbiased, ols_raw, sigmoid_factor, sigmoid_factor_at, CorrectionParams,
    EstimatorId,
};
use crate::rng::{derive_seed, rng_from_seed};

/// Sorted Pareto sample with cutoff 1. A uniform draw of exactly 1 lands on
/// the cutoff itself; the cutoff is then moved just below the data.
pub fn unit_cutoff_pareto_sample(beta: f64, n: usize, seed: u64) -> Result<Sample> {
    let mut rng = rng_from_seed(seed);
    let mut xs = pareto_draws(1.0, beta, n, &mut rng);
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    xs.sort_by(f64::total_cmp);
    let xm = if xs[0] > 1.0 {
        1.0
    } else {
        xs[0] * (1.0 - f64::EPSILON)
    };
    Ok(Sample::from_sorted_unchecked(xs, xm))
}

fn default_estimators() -> Vec<EstimatorId> {
    EstimatorId::ALL.to_vec()
}

fn default_gamma() -> f64 {
    CorrectionParams::DEFAULT_GAMMA
}

fn default_true() -> bool {
    true
}

/// Monte-Carlo configuration. Loads from JSON with the same field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentGrid {
    pub beta_true: f64,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorId>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Report `P(|OLS2 - beta| < |MLE2 - beta|)`; needs both estimators.
    #[serde(default = "default_true")]
    pub closer_probability: bool,
}

impl ExperimentGrid {
    pub fn new(beta_true: f64, n_grid: Vec<usize>, replications: usize, seed: u64) -> Self {
        Self {
            beta_true,
            n_grid,
            replications,
            seed,
            estimators: default_estimators(),
            gamma: default_gamma(),
            closer_probability: true,
        }
    }

    /// `start, start + step, ..., <= end`.
    pub fn stepped(start: usize, end: usize, step: usize) -> Vec<usize> {
        (start..=end).step_by(step.max(1)).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGrid(m));
        if !(self.beta_true.is_finite() && self.beta_true > 0.0) {
            return bad(format!(
                "beta_true must be positive, got {}",
                self.beta_true
            ));
        }
        if self.n_grid.is_empty() {
            return bad("n_grid is empty".into());
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n_grid must be strictly ascending".into());
        }
        if self.n_grid[0] < 2 {
            return bad(format!(
                "n_grid entries must be >= 2, got {}",
                self.n_grid[0]
            ));
        }
        if self.replications < 2 {
            return bad(format!(
                "replications must be >= 2, got {}",
                self.replications
            ));
        }
        if self.estimators.is_empty() {
            return bad("no estimators requested".into());
        }
        let params = CorrectionParams::new(self.gamma)?;
        if self.estimators.contains(&EstimatorId::Ols2) {
            for &n in &self.n_grid {
                sigmoid_factor(n, &params)?;
            }
        }
        Ok(())
    }

    /// Whether the closer-probability table can and should be produced.
    pub fn wants_closer(&self) -> bool {
        self.closer_probability
            && self.estimators.contains(&EstimatorId::Mle2)
            && self.estimators.contains(&EstimatorId::Ols2)
    }

    fn estimator_set(&self) -> Vec<EstimatorId> {
        let mut ids = self.estimators.clone();
        ids.sort();
        ids.dedup();
        ids
    }
}

/// Raw estimates, indexed by sample size and estimator, one entry per
/// replication in replication order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEstimates {
    pub beta_true: f64,
    pub gamma: f64,
    pub replications: usize,
    pub rows: Vec<(usize, BTreeMap<EstimatorId, Vec<f64>>)>,
    closer: bool,
}

impl GridEstimates {
    pub fn at(&self, n: usize, id: EstimatorId) -> Option<&[f64]> {
        self.rows
            .iter()
            .find(|(m, _)| *m == n)
            .and_then(|(_, map)| map.get(&id))
            .map(Vec::as_slice)
    }

    pub fn stats(&self) -> GridStats {
        let mut cells = Vec::new();
        let mut closer = self.closer.then(Vec::new);
        for (n, map) in &self.rows {
            for (&estimator, values) in map {
                let (mean, variance) = mean_variance(values);
                cells.push(CellStats {
                    n: *n,
                    estimator,
                    mean,
                    variance,
                    se_mean: (variance / values.len() as f64).sqrt(),
                });
            }
            if let Some(rows) = closer.as_mut() {
                let mle = &map[&EstimatorId::Mle2];
                let ols = &map[&EstimatorId::Ols2];
                rows.push(CloserRow {
                    n: *n,
                    closer_probability: closer_fraction(ols, mle, self.beta_true),
                });
            }
        }
        GridStats { cells, closer }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub n: usize,
    pub estimator: EstimatorId,
    pub mean: f64,
    /// Unbiased sample variance (divisor R - 1).
    pub variance: f64,
    pub se_mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloserRow {
    pub n: usize,
    pub closer_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridStats {
    pub cells: Vec<CellStats>,
    /// `None` when MLE2 or OLS2 was not requested.
    pub closer: Option<Vec<CloserRow>>,
}

impl GridStats {
    pub fn cell(&self, n: usize, id: EstimatorId) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.n == n && c.estimator == id)
    }

    /// `(n, value)` pairs for one estimator across the grid.
    pub fn curve(&self, id: EstimatorId, field: impl Fn(&CellStats) -> f64) -> Vec<(usize, f64)> {
        self.cells
            .iter()
            .filter(|c| c.estimator == id)
            .map(|c| (c.n, field(c)))
            .collect()
    }

    /// CSV with header `n,estimator,mean,variance,se_mean`.
    pub fn write_stats_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for c in &self.cells {
            w.serialize(c)?;
        }
        w.flush()?;
        Ok(())
    }

    /// CSV with header `n,closer_probability`; writes nothing when the table
    /// was not computed.
    pub fn write_closer_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in self.closer.iter().flatten() {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (r - 1.0))
}

/// Fraction of paired replications where `a` is strictly closer to `beta`
/// than `b`.
pub fn closer_fraction(a: &[f64], b: &[f64], beta: f64) -> f64 {
    let wins = a
        .iter()
        .zip(b)
        .filter(|(x, y)| (*x - beta).abs() < (*y - beta).abs())
        .count();
    wins as f64 / a.len() as f64
}

/// Fraction of estimates inside `(beta - beta/sqrt(n), beta + beta/sqrt(n))`.
pub fn interval_coverage(estimates: &[f64], beta: f64, n: usize) -> f64 {
    let (lo, hi) = crate::estimators::mle_sd_interval(beta, n);
    let inside = estimates.iter().filter(|&&b| b > lo && b < hi).count();
    inside as f64 / estimates.len() as f64
}

/// Runs the grid and keeps every estimate.
pub fn run_grid_estimates(g: &ExperimentGrid) -> Result<GridEstimates> {
    g.validate()?;
    let ids = g.estimator_set();
    let params = CorrectionParams::new(g.gamma)?;
    let reps = g.replications;

    let cells: Vec<[f64; 4]> = (0..g.n_grid.len() * reps)
        .into_par_iter()
        .map(|cell| {
            let n = g.n_grid[cell / reps];
            let rep = cell % reps;
            let s = unit_cutoff_pareto_sample(
                g.beta_true,
                n,
                derive_seed(g.seed, &[n as u64, rep as u64]),
            )?;
            let mut out = [f64::NAN; 4];
            for &id in &ids {
                out[id as usize] = match id {
                    EstimatorId::Mle1 => mle_raw(&s)?.beta_hat,
                    EstimatorId::Mle2 => mle_unbiased(&s)?.beta_hat,
                    EstimatorId::Ols1 => ols_raw(&s)?.beta_hat,
                    // OLS2 is OLS1 on the same sample divided by r_n
                    EstimatorId::Ols2 => ols_raw(&s)?.beta_hat / sigmoid_factor(n, &params)?,
                };
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let rows = g
        .n_grid
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let block = &cells[k * reps..(k + 1) * reps];
            let map = ids
                .iter()
                .map(|&id| (id, block.iter().map(|c| c[id as usize]).collect()))
                .collect();
            (n, map)
        })
        .collect();
    Ok(GridEstimates {
        beta_true: g.beta_true,
        gamma: g.gamma,
        replications: reps,
        rows,
        closer: g.wants_closer(),
    })
}

/// Per-`(n, estimator)` mean, variance and standard error, plus the
/// closer-probability table when both MLE2 and OLS2 are requested.
pub fn run_grid(g: &ExperimentGrid) -> Result<GridStats> {
    Ok(run_grid_estimates(g)?.stats())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaFit {
    pub gamma: f64,
    /// Residual sum of squares at the fitted gamma.
    pub objective: f64,
    pub points: usize,
}

/// Sum of squared differences between `mean(n)/beta` and `r_n(gamma)`.
pub fn gamma_objective(curve: &[(usize, f64)], beta_true: f64, gamma: f64) -> Result<f64> {
    curve.iter().try_fold(0.0, |acc, &(n, mean)| {
        let d = mean / beta_true - sigmoid_factor_at(n as f64, gamma)?;
        Ok(acc + d * d)
    })
}

/// Least-squares fit of `gamma` in the sigmoid bias model to a curve of mean
/// OLS1 estimates, by golden-section search on `[lo, hi]` to absolute
/// tolerance 1e-4.
pub fn fit_gamma(curve: &[(usize, f64)], beta_true: f64, (lo, hi): (f64, f64)) -> Result<GammaFit> {
    const TOL: f64 = 1e-4;
    if curve.len() < 3 {
        return Err(Error::TooFewPoints {
            what: "gamma fit",
            needed: 3,
            got: curve.len(),
        });
    }
    if !(beta_true.is_finite() && beta_true > 0.0) {
        return Err(Error::domain("beta_true", beta_true, "must be positive"));
    }
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::domain("gamma bounds", lo, "need 0 < lo < hi"));
    }
    if let Some(&(n, _)) = curve.iter().find(|(n, _)| *n < 2) {
        return Err(Error::domain(
            "n",
            n as f64,
            "curve sample sizes must be >= 2",
        ));
    }
    // (ln n)^gamma is monotone in gamma, so checking both ends covers the bracket
    gamma_objective(curve, beta_true, lo)?;
    gamma_objective(curve, beta_true, hi)?;

    let f = |g: f64| gamma_objective(curve, beta_true, g).expect("bracket checked");
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let gamma = 0.5 * (a + b);
    Ok(GammaFit {
        gamma,
        objective: f(gamma),
        points: curve.len(),
    })
}

/// Least-squares slope of `ln(variance)` on `ln(n)`.
pub fn variance_slope(curve: &[(usize, f64)]) -> Result<f64> {
    if curve.len() < 3 {
        return Err(Error::TooFewPoints {
            what: "variance slope",
            needed: 3,
            got: curve.len(),
        });
    }
    if let Some(&(_, v)) = curve.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::domain("variance", v, "must be positive"));
    }
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .map(|&(n, v)| ((n as f64).ln(), v.ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Undefined("all sample sizes are equal"));
    }
    Ok(sxy / sxx)
}
