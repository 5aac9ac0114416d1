//! Exponent estimators for a Pareto tail with known cutoff.
//!
//! * `MLE1`: the Hill estimator `n / sum ln(x_i/xm)`.
//! * `MLE2`: its unbiased rescaling `(n-1) / sum ln(x_i/xm)`.
//! * `OLS1`: the no-intercept least-squares slope of `-ln P_n(X >= x_(i))`
//!   on `ln(x_(i)/xm)`.
//! * `OLS2`: `OLS1 / r_n`, where `r_n = ln(e - (ln n)^gamma / n)` models the
//!   sigmoid-shaped downward bias of `OLS1`.
//!
//! All four depend on the data only through the ratios `x_i / xm`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::empirical::Sample;
use crate::error::{check_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EstimatorId {
    #[serde(rename = "MLE1")]
    Mle1,
    #[serde(rename = "MLE2")]
    Mle2,
    #[serde(rename = "OLS1")]
    Ols1,
    #[serde(rename = "OLS2")]
    Ols2,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 4] = [
        EstimatorId::Mle1,
        EstimatorId::Mle2,
        EstimatorId::Ols1,
        EstimatorId::Ols2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorId::Mle1 => "MLE1",
            EstimatorId::Mle2 => "MLE2",
            EstimatorId::Ols1 => "OLS1",
            EstimatorId::Ols2 => "OLS2",
        }
    }

    /// Smallest sample size the estimator accepts.
    pub fn min_n(&self) -> usize {
        match self {
            EstimatorId::Mle1 => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "MLE1" => Ok(EstimatorId::Mle1),
            "MLE2" => Ok(EstimatorId::Mle2),
            "OLS1" => Ok(EstimatorId::Ols1),
            "OLS2" => Ok(EstimatorId::Ols2),
            _ => Err(format!(
                "unknown estimator {s:?} (expected MLE1, MLE2, OLS1 or OLS2)"
            )),
        }
    }
}

/// A point estimate with the metadata needed to reproduce it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimator: EstimatorId,
    pub beta_hat: f64,
    pub n: usize,
    /// Multiplier applied to the raw estimate: 1, `(n-1)/n` or `1/r_n`.
    pub correction: f64,
    /// Only set for OLS2.
    pub gamma: Option<f64>,
}

/// Exponent of the sigmoid bias model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionParams {
    gamma: f64,
}

impl CorrectionParams {
    pub const DEFAULT_GAMMA: f64 = 1.6;

    pub fn new(gamma: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Default for CorrectionParams {
    fn default() -> Self {
        Self {
            gamma: Self::DEFAULT_GAMMA,
        }
    }
}

fn require_n(what: &'static str, needed: usize, got: usize) -> Result<()> {
    if got < needed {
        Err(Error::TooFewPoints { what, needed, got })
    } else {
        Ok(())
    }
}

fn sum_log_ratio(s: &Sample) -> Result<f64> {
    let xm = s.xm();
    let sum: f64 = s.values().iter().map(|&x| (x / xm).ln()).sum();
    if !(sum > 0.0) {
        return Err(Error::Undefined("sum of ln(x_i/xm) is zero"));
    }
    Ok(sum)
}

/// Hill / maximum-likelihood estimator `1 / mean(ln(x_i/xm))`.
pub fn mle_raw(s: &Sample) -> Result<EstimateReport> {
    let n = s.len();
    require_n("MLE1", 1, n)?;
    let sum = sum_log_ratio(s)?;
    Ok(EstimateReport {
        estimator: EstimatorId::Mle1,
        beta_hat: n as f64 / sum,
        n,
        correction: 1.0,
        gamma: None,
    })
}

/// Unbiased MLE `(n-1) / sum ln(x_i/xm)`, defined for `n >= 2`.
pub fn mle_unbiased(s: &Sample) -> Result<EstimateReport> {
    let n = s.len();
    require_n("MLE2", 2, n)?;
    let sum = sum_log_ratio(s)?;
    Ok(EstimateReport {
        estimator: EstimatorId::Mle2,
        beta_hat: (n - 1) as f64 / sum,
        n,
        correction: (n - 1) as f64 / n as f64,
        gamma: None,
    })
}

/// No-intercept least-squares slope on ascending log-ratios `k_(i)`, with
/// `-ln P_n(X >= x_(i)) = ln n - ln(n - i + 1)`.
pub(crate) fn ols_slope_sorted(log_ratios: &[f64]) -> Result<f64> {
    let n = log_ratios.len();
    require_n("OLS", 2, n)?;
    let ln_n = (n as f64).ln();
    let (num, den) = log_ratios
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(num, den), (k, &lr)| {
            let neg_log_tail = ln_n - ((n - k) as f64).ln();
            (num + lr * neg_log_tail, den + lr * lr)
        });
    if !(den > 0.0) {
        return Err(Error::Undefined("sum of squared ln(x_i/xm) is zero"));
    }
    Ok(num / den)
}

/// Least-squares estimator on the log empirical tail.
pub fn ols_raw(s: &Sample) -> Result<EstimateReport> {
    let n = s.len();
    require_n("OLS1", 2, n)?;
    let beta_hat = ols_slope_sorted(&s.log_ratios())?;
    Ok(EstimateReport {
        estimator: EstimatorId::Ols1,
        beta_hat,
        n,
        correction: 1.0,
        gamma: None,
    })
}

/// `r_n = ln(e - (ln n)^gamma / n)`: the approximate mean of `OLS1 / beta`.
pub fn sigmoid_factor(n: usize, params: &CorrectionParams) -> Result<f64> {
    require_n("sigmoid factor", 2, n)?;
    sigmoid_factor_at(n as f64, params.gamma)
}

/// `r_n` for real `n >= 2`; used by the gamma fit.
pub fn sigmoid_factor_at(n: f64, gamma: f64) -> Result<f64> {
    let arg = std::f64::consts::E - n.ln().powf(gamma) / n;
    if !(arg > 1.0) {
        return Err(Error::domain(
            "gamma",
            gamma,
            "(ln n)^gamma / n must stay below e - 1 so that r_n is positive",
        ));
    }
    Ok(arg.ln())
}

/// Bias-corrected least-squares estimator `OLS1 / r_n`.
pub fn ols_corrected(s: &Sample, params: &CorrectionParams) -> Result<EstimateReport> {
    let raw = ols_raw(s)?;
    let r = sigmoid_factor(raw.n, params)?;
    Ok(EstimateReport {
        estimator: EstimatorId::Ols2,
        beta_hat: raw.beta_hat / r,
        n: raw.n,
        correction: 1.0 / r,
        gamma: Some(params.gamma),
    })
}

/// Runs the named estimator.
pub fn estimate(id: EstimatorId, s: &Sample, params: &CorrectionParams) -> Result<EstimateReport> {
    match id {
        EstimatorId::Mle1 => mle_raw(s),
        EstimatorId::Mle2 => mle_unbiased(s),
        EstimatorId::Ols1 => ols_raw(s),
        EstimatorId::Ols2 => ols_corrected(s, params),
    }
}

/// One-standard-deviation band `(beta - beta/sqrt(n), beta + beta/sqrt(n))`
/// of the asymptotic normal law of the MLE.
pub fn mle_sd_interval(beta: f64, n: usize) -> (f64, f64) {
    let half = beta / (n as f64).sqrt();
    (beta - half, beta + half)
}

/// Sample size above which the band is narrower than `width`: `4 beta^2 / width^2`.
pub fn mle_required_n(beta: f64, width: f64) -> f64 {
    4.0 * beta * beta / (width * width)
}
