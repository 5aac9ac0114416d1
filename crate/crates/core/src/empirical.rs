//! Ordered samples, the empirical tail `P_n(X >= x)` and its error model.

use std::io::Write;

use serde::Serialize;

use crate::distributions::PowerLawTail;
use crate::error::{check_positive, Error, Result};

/// Data from the tail region: every value lies strictly above `xm`.
/// Values are kept in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    xm: f64,
}

impl Sample {
    /// Sorts `raw` ascending and pairs it with the cutoff. Rejects empty input,
    /// non-finite values and any value not strictly above `xm`.
    pub fn new(mut raw: Vec<f64>, xm: f64) -> Result<Self> {
        check_positive("xm", xm)?;
        if raw.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((index, &value)) = raw
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v > xm) || !v.is_finite())
        {
            return Err(Error::CutoffViolation { index, value, xm });
        }
        // stable, so floating-point ties keep their input order
        raw.sort_by(f64::total_cmp);
        Ok(Self { values: raw, xm })
    }

    /// Keeps only the values strictly above `xm`. Returns the sample and the
    /// number of values dropped.
    pub fn above_cutoff(raw: &[f64], xm: f64) -> Result<(Self, usize)> {
        let kept: Vec<f64> = raw.iter().copied().filter(|&v| v > xm).collect();
        let dropped = raw.len() - kept.len();
        Ok((Self::new(kept, xm)?, dropped))
    }

    /// Wraps values already known to be ascending and above `xm`.
    pub(crate) fn from_sorted_unchecked(values: Vec<f64>, xm: f64) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(values.first().is_some_and(|&v| v > xm));
        Self { values, xm }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn xm(&self) -> f64 {
        self.xm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `ln(x_(i) / xm)` for the ordered values.
    pub fn log_ratios(&self) -> Vec<f64> {
        self.values.iter().map(|&x| (x / self.xm).ln()).collect()
    }
}

/// Shorthand for [`Sample::new`].
pub fn order_sample(raw: Vec<f64>, xm: f64) -> Result<Sample> {
    Sample::new(raw, xm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPoint {
    pub x: f64,
    pub tail: f64,
}

/// Empirical tail evaluated at the ordered sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCurve {
    pub points: Vec<TailPoint>,
    pub n: usize,
}

impl TailCurve {
    /// Writes the curve as CSV with header `x,tail`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Empirical tail value at the `i`-th smallest point (1-based) of `n`:
/// `(n - i + 1) / n`.
#[inline]
pub fn rank_tail(i: usize, n: usize) -> f64 {
    (n - i + 1) as f64 / n as f64
}

/// The ">=" convention: the `i`-th ordered point gets `(n - i + 1)/n`, so the
/// smallest value is 1/n, never 0.
pub fn empirical_tail(s: &Sample) -> TailCurve {
    let n = s.len();
    let points = s
        .values
        .iter()
        .enumerate()
        .map(|(k, &x)| TailPoint {
            x,
            tail: rank_tail(k + 1, n),
        })
        .collect();
    TailCurve { points, n }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub x: f64,
    pub empirical_tail: f64,
    pub model_tail: f64,
    /// `empirical - model`.
    pub residual: f64,
    /// `ln(1 + residual / model) = ln(empirical / model)`, the additive error
    /// of the log-log regression.
    pub log_residual: f64,
    /// Binomial variance `(1/n) p (1 - p)` with `p` the model tail.
    pub model_variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailErrorDiagnostics {
    pub points: Vec<ResidualPoint>,
    pub n: usize,
}

/// Residuals of the empirical tail against a model. Diagnostic only; no
/// estimator uses this.
pub fn log_residuals(s: &Sample, model: &PowerLawTail) -> Result<TailErrorDiagnostics> {
    if (model.xm() - s.xm()).abs() > 1e-12 * s.xm() {
        return Err(Error::domain(
            "model.xm",
            model.xm(),
            "must equal the cutoff of the sample",
        ));
    }
    let n = s.len();
    let nf = n as f64;
    let points = empirical_tail(s)
        .points
        .into_iter()
        .map(|p| {
            let model_tail = model.tail(p.x).expect("sample values lie above the cutoff");
            let residual = p.tail - model_tail;
            ResidualPoint {
                x: p.x,
                empirical_tail: p.tail,
                model_tail,
                residual,
                log_residual: (residual / model_tail).ln_1p(),
                model_variance: model_tail * (1.0 - model_tail) / nf,
            }
        })
        .collect();
    Ok(TailErrorDiagnostics { points, n })
}

/// Empirical tail at an arbitrary point, `(1/n) #{x_i >= x}`.
pub fn tail_at(s: &Sample, x: f64) -> f64 {
    let below = s.values.partition_point(|&v| v < x);
    (s.len() - below) as f64 / s.len() as f64
}

/// Largest absolute gap between the empirical tail and a model over the
/// sample points, both sides of each jump.
pub fn sup_tail_gap(s: &Sample, model: impl Fn(f64) -> f64) -> f64 {
    let n = s.len();
    s.values
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let m = model(x);
            let at = rank_tail(k + 1, n);
            let after = rank_tail(k + 1, n) - 1.0 / n as f64;
            (at - m).abs().max((after - m).abs())
        })
        .fold(0.0, f64::max)
}
