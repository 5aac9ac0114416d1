//! Estimating the exponent of a Pareto (power-law) tail.
//!
//! The crate provides samplers for the Pareto, piecewise exponential/power-law
//! and Lomax laws, the empirical tail of an ordered sample, four exponent
//! estimators (the Hill/MLE estimator, its unbiased variant, least squares on
//! the log empirical tail and a sigmoid bias-corrected version of it), cutoff
//! selection by KS minimisation, exact simulation of the least-squares
//! estimator via exponential order statistics, and a Monte-Carlo harness for
//! comparing the estimators.
//!
//! ```
//! use tailfit::{mle_unbiased, ols_corrected, sample, CorrectionParams, PowerLawTail, Sample};
//!
//! let law = PowerLawTail::pareto(1.0, 1.5).unwrap();
//! let raw = sample(law, 5_000, 7).unwrap();
//! let (tail, _) = Sample::above_cutoff(&raw, 1.0).unwrap();
//! let mle = mle_unbiased(&tail).unwrap();
//! let ols = ols_corrected(&tail, &CorrectionParams::default()).unwrap();
//! assert!((mle.beta_hat - 1.5).abs() < 0.1);
//! assert!((ols.beta_hat - 1.5).abs() < 0.15);
//! ```

pub mod cutoff;
pub mod distributions;
pub mod empirical;
pub mod error;
pub mod estimators;
pub mod ks;
pub mod montecarlo;
pub mod renyi;
pub mod rng;

pub use cutoff::{ks_distance, scan_cutoff, CutoffScanResult, CutoffSummary, ScanPoint};
pub use distributions::{
    sample, Distribution, LomaxParams, PiecewiseParams, PowerLawTail, Sampler,
};
pub use empirical::{
    empirical_tail, log_residuals, order_sample, Sample, TailCurve, TailErrorDiagnostics,
};
pub use error::{Error, Result};
pub use estimators::{
    estimate, mle_raw, mle_sd_interval, mle_unbiased, ols_corrected, ols_raw, sigmoid_factor,
    CorrectionParams, EstimateReport, EstimatorId,
};
pub use montecarlo::{
    fit_gamma, run_grid, run_grid_estimates, variance_slope, ExperimentGrid, GammaFit, GridStats,
};
pub use renyi::{
    renyi_ols_factor, renyi_order_logs, renyi_vs_direct, EquivalenceReport, RenyiDraw,
};
pub use rng::DEFAULT_SEED;
