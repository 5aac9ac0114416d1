//! Tail functions and inverse-transform samplers for the Pareto power-law
//! tail, the piecewise exponential/power-law law, and the Lomax law.
//!
//! Each distribution is described by its survival function `P(X > x)` and
//! sampled by inverting it on uniforms drawn from (0, 1].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, check_unit_interval, Error, Result};
use crate::rng::{open_closed_unit, rng_from_seed, ChaCha8Rng};

/// Power-law tail `P(X > x) = alpha / x^beta` for `x >= xm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawTail {
    alpha: f64,
    beta: f64,
    xm: f64,
}

impl PowerLawTail {
    /// `alpha / xm^beta` must lie in (0, 1]: it is the probability mass above
    /// the cutoff.
    pub fn new(alpha: f64, beta: f64, xm: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        check_positive("xm", xm)?;
        let p = alpha / xm.powf(beta);
        if !(p > 0.0 && p <= 1.0 + 1e-12) {
            return Err(Error::domain(
                "alpha",
                alpha,
                "tail probability at the cutoff must lie in (0, 1]",
            ));
        }
        Ok(Self { alpha, beta, xm })
    }

    /// The Pareto law: `alpha = xm^beta`, so the tail is 1 at the cutoff.
    pub fn pareto(xm: f64, beta: f64) -> Result<Self> {
        check_positive("beta", beta)?;
        check_positive("xm", xm)?;
        Ok(Self {
            alpha: xm.powf(beta),
            beta,
            xm,
        })
    }

    /// Builds the tail from the probability mass above the cutoff,
    /// `alpha = P(X > xm) * xm^beta`.
    pub fn from_tail_probability(p_xm: f64, beta: f64, xm: f64) -> Result<Self> {
        check_unit_interval(p_xm).map_err(|_| {
            Error::domain(
                "p_xm",
                p_xm,
                "tail probability at the cutoff must lie in (0, 1]",
            )
        })?;
        check_positive("beta", beta)?;
        check_positive("xm", xm)?;
        Ok(Self {
            alpha: p_xm * xm.powf(beta),
            beta,
            xm,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn xm(&self) -> f64 {
        self.xm
    }

    pub fn tail_probability_at_xm(&self) -> f64 {
        self.alpha / self.xm.powf(self.beta)
    }

    pub fn is_full_pareto(&self) -> bool {
        (self.tail_probability_at_xm() - 1.0).abs() <= 1e-12
    }

    /// `alpha / x^beta`, written as `P(X > xm) * (xm/x)^beta` for accuracy.
    pub fn tail(&self, x: f64) -> Result<f64> {
        if !(x >= self.xm) || !x.is_finite() {
            return Err(Error::domain(
                "x",
                x,
                "must be finite and not below the cutoff",
            ));
        }
        Ok(self.tail_probability_at_xm() * (self.xm / x).powf(self.beta))
    }

    /// Pareto CDF of the tail-conditioned law, `1 - (xm/x)^beta`.
    pub fn conditional_cdf(&self, x: f64) -> f64 {
        if x <= self.xm {
            0.0
        } else {
            1.0 - (self.xm / x).powf(self.beta)
        }
    }

    /// Inverts the tail on `(0, P(X > xm)]`; for a full Pareto this is
    /// `xm * u^(-1/beta)`.
    pub fn inverse_tail(&self, u: f64) -> Result<f64> {
        check_unit_interval(u)?;
        let p = self.tail_probability_at_xm();
        if self.is_full_pareto() {
            return Ok(self.xm * u.powf(-1.0 / self.beta));
        }
        if u > p {
            return Err(Error::domain(
                "u",
                u,
                "exceeds the tail probability at the cutoff",
            ));
        }
        Ok(self.xm * (u / p).powf(-1.0 / self.beta))
    }
}

/// Exponential body up to `xm`, power-law tail beyond it:
/// `e^(-beta x / xm)` on (0, xm] and `e^(-beta) (xm/x)^beta` above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseParams {
    xm: f64,
    beta: f64,
}

impl PiecewiseParams {
    pub fn new(xm: f64, beta: f64) -> Result<Self> {
        check_positive("xm", xm)?;
        check_positive("beta", beta)?;
        Ok(Self { xm, beta })
    }

    pub fn xm(&self) -> f64 {
        self.xm
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The power-law part, as a tail with mass `e^(-beta)` above `xm`.
    pub fn power_law_part(&self) -> PowerLawTail {
        PowerLawTail {
            alpha: (-self.beta).exp() * self.xm.powf(self.beta),
            beta: self.beta,
            xm: self.xm,
        }
    }

    pub fn tail(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::domain(
                "x",
                x,
                "must be finite and strictly positive",
            ));
        }
        Ok(if x <= self.xm {
            (-self.beta * x / self.xm).exp()
        } else {
            (-self.beta).exp() * (self.xm / x).powf(self.beta)
        })
    }

    pub fn inverse_tail(&self, u: f64) -> Result<f64> {
        check_unit_interval(u)?;
        let knee = (-self.beta).exp();
        Ok(if u >= knee {
            -(self.xm / self.beta) * u.ln()
        } else {
            self.xm * (knee / u).powf(1.0 / self.beta)
        })
    }
}

/// Lomax (Pareto type II) law with tail `(1 + x/lambda)^(-beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LomaxParams {
    lambda: f64,
    beta: f64,
}

impl LomaxParams {
    pub fn new(lambda: f64, beta: f64) -> Result<Self> {
        check_positive("lambda", lambda)?;
        check_positive("beta", beta)?;
        Ok(Self { lambda, beta })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tail(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::domain("x", x, "must be finite and nonnegative"));
        }
        Ok((-self.beta * (x / self.lambda).ln_1p()).exp())
    }

    pub fn inverse_tail(&self, u: f64) -> Result<f64> {
        check_unit_interval(u)?;
        // u^(-1/beta) - 1, computed without cancellation near u = 1.
        Ok(self.lambda * (-u.ln() / self.beta).exp_m1())
    }
}

/// One of the three supported laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Pareto(PowerLawTail),
    Piecewise(PiecewiseParams),
    Lomax(LomaxParams),
}

impl Distribution {
    pub fn tail(&self, x: f64) -> Result<f64> {
        match self {
            Distribution::Pareto(p) => p.tail(x),
            Distribution::Piecewise(p) => p.tail(x),
            Distribution::Lomax(p) => p.tail(x),
        }
    }

    pub fn inverse_tail(&self, u: f64) -> Result<f64> {
        match self {
            Distribution::Pareto(p) => p.inverse_tail(u),
            Distribution::Piecewise(p) => p.inverse_tail(u),
            Distribution::Lomax(p) => p.inverse_tail(u),
        }
    }

    /// Lower end of the support.
    pub fn support_min(&self) -> f64 {
        match self {
            Distribution::Pareto(p) => p.xm,
            Distribution::Piecewise(_) | Distribution::Lomax(_) => 0.0,
        }
    }
}

impl From<PowerLawTail> for Distribution {
    fn from(p: PowerLawTail) -> Self {
        Distribution::Pareto(p)
    }
}

impl From<PiecewiseParams> for Distribution {
    fn from(p: PiecewiseParams) -> Self {
        Distribution::Piecewise(p)
    }
}

impl From<LomaxParams> for Distribution {
    fn from(p: LomaxParams) -> Self {
        Distribution::Lomax(p)
    }
}

/// Inverse-transform sampler owning its random stream.
#[derive(Debug, Clone)]
pub struct Sampler {
    dist: Distribution,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(dist: impl Into<Distribution>, seed: u64) -> Self {
        Self {
            dist: dist.into(),
            rng: rng_from_seed(seed),
        }
    }

    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }

    pub fn draw(&mut self) -> f64 {
        let u = open_closed_unit(&mut self.rng);
        draw_with(&self.dist, u)
    }

    pub fn draw_n(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.draw()).collect()
    }
}

/// Parameters are validated at construction and `u` lies in (0, 1], so the
/// inversions below cannot fail.
#[inline]
fn draw_with(dist: &Distribution, u: f64) -> f64 {
    match dist {
        // draws from the tail-conditioned law X | X > xm
        Distribution::Pareto(p) => p.xm * u.powf(-1.0 / p.beta),
        Distribution::Piecewise(p) => p
            .inverse_tail(u)
            .expect("validated parameters and u in (0, 1]"),
        Distribution::Lomax(p) => p.lambda * (-u.ln() / p.beta).exp_m1(),
    }
}

/// `n` i.i.d. draws; identical `(dist, n, seed)` always yields identical output.
pub fn sample(dist: impl Into<Distribution>, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::TooFewPoints {
            what: "sample",
            needed: 1,
            got: 0,
        });
    }
    Ok(Sampler::new(dist, seed).draw_n(n))
}

/// Draws `n` values from a Pareto law with an existing generator.
pub fn pareto_draws<R: Rng + ?Sized>(xm: f64, beta: f64, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| xm * open_closed_unit(rng).powf(-1.0 / beta))
        .collect()
}
