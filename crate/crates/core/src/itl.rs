//! Univariate inverse Topp-Leone (ITL) distribution on the positive half-line.
//!
//! With shape `ξ > 0` the survival function is
//!
//! ```text
//! S(x) = (x+1)^(-2ξ) (2x+1)^ξ = r(x)^ξ,   r(x) = (2x+1)/(x+1)^2 = 1 - (x/(x+1))^2
//! ```
//!
//! and `F = 1 - S`, `f(x) = 2ξx (x+1)^(-(2ξ+1)) (2x+1)^(ξ-1)`. Every power is
//! evaluated as `exp(ξ·ln r(x))` so that large `x` or `ξ` never overflow.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_nonneg, Error, Result};

/// Shape parameter of an ITL marginal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItlParams {
    shape: f64,
}

/// `ln r(x) = ln(2x+1) - 2 ln(x+1)`, always `<= 0`.
///
/// Below `x = 1` the difference of logarithms cancels (it behaves like `-x^2`),
/// so the equivalent `ln(1 - t^2)` with `t = x/(x+1)` is used there.
pub(crate) fn ln_ratio(x: f64) -> f64 {
    if x < 1.0 {
        let t = x / (x + 1.0);
        (-t * t).ln_1p()
    } else {
        // ln(2x+1) written so that 2x cannot overflow
        std::f64::consts::LN_2 + (x + 0.5).ln() - 2.0 * x.ln_1p()
    }
}

/// `x / ((x+1)(2x+1))` without forming the (possibly overflowing) product.
pub(crate) fn hazard_kernel(x: f64) -> f64 {
    (x / (x + 1.0)) / (2.0 * x + 1.0)
}

impl ItlParams {
    pub fn new(shape: f64) -> Result<Self> {
        if !shape.is_finite() || shape <= 0.0 {
            return Err(Error::Domain(format!(
                "ITL shape must be positive and finite, got {shape}"
            )));
        }
        Ok(Self { shape })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    /// Log survival, `ξ·ln r(x)`.
    pub fn ln_sf(&self, x: f64) -> Result<f64> {
        check_nonneg("x", x)?;
        Ok(self.shape * ln_ratio(x))
    }

    /// Distribution function `F(x) = 1 - (x+1)^(-2ξ)(2x+1)^ξ`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(-self.ln_sf(x)?.exp_m1())
    }

    /// Survival function, evaluated directly rather than as `1 - cdf`.
    pub fn sf(&self, x: f64) -> Result<f64> {
        Ok(self.ln_sf(x)?.exp())
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        let s = self.sf(x)?;
        Ok(2.0 * self.shape * hazard_kernel(x) * s)
    }

    /// Log density; `-inf` at `x = 0`.
    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        check_nonneg("x", x)?;
        if x == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok((2.0 * self.shape).ln() + x.ln() - x.ln_1p() - (2.0 * x).ln_1p()
            + self.shape * ln_ratio(x))
    }

    /// Hazard rate `f/S = 2ξx / ((x+1)(2x+1))`.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        check_nonneg("x", x)?;
        Ok(2.0 * self.shape * hazard_kernel(x))
    }

    /// Reversed hazard `f/F`; undefined at `x = 0` where `F = 0`.
    pub fn reversed_hazard(&self, x: f64) -> Result<f64> {
        let f = self.pdf(x)?;
        let cdf = self.cdf(x)?;
        if cdf <= 0.0 {
            return Err(Error::Singularity(format!(
                "reversed hazard undefined where F(x) = 0 (x = {x})"
            )));
        }
        Ok(f / cdf)
    }

    /// Inverse of [`cdf`](Self::cdf) for `q` in `[0, 1)`.
    ///
    /// `S(x) = (1 - t^2)^ξ` with `t = x/(x+1)`, so `t = sqrt(1 - (1-q)^(1/ξ))`
    /// and `x = t/(1-t) = t(1+t)/(1-q)^(1/ξ)`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::Domain(format!(
                "quantile level must lie in [0, 1), got {q}"
            )));
        }
        if q == 0.0 {
            return Ok(0.0);
        }
        let log_w = (-q).ln_1p() / self.shape;
        let t = (-log_w.exp_m1()).sqrt();
        let w = log_w.exp();
        let x = t * (1.0 + t) / w;
        if !x.is_finite() {
            return Err(Error::Domain(format!(
                "quantile at q = {q} exceeds the representable range for shape {}",
                self.shape
            )));
        }
        Ok(x)
    }

    /// `n` i.i.d. draws by inversion of open-interval uniforms.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        (0..n)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                self.quantile(u)
            })
            .collect()
    }

    /// Closed-form maximum-likelihood shape for a complete sample:
    /// the score `n/ξ + Σ ln r(xᵢ)` vanishes at `ξ = -n / Σ ln r(xᵢ)`.
    pub fn fit(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::Data("cannot fit an ITL shape to an empty sample".into()));
        }
        let mut total = 0.0;
        for &x in xs {
            if !x.is_finite() || x <= 0.0 {
                return Err(Error::Data(format!(
                    "observations must be positive and finite, got {x}"
                )));
            }
            total += ln_ratio(x);
        }
        Self::new(-(xs.len() as f64) / total)
            .map_err(|e| Error::Fit(format!("univariate ITL fit: {e}")))
    }

    /// Shape that places the median at `m`: solves `ξ·ln r(m) = ln(1/2)`.
    pub fn from_median(m: f64) -> Result<Self> {
        if !m.is_finite() || m <= 0.0 {
            return Err(Error::Domain(format!("median must be positive, got {m}")));
        }
        Self::new(-std::f64::consts::LN_2 / ln_ratio(m))
    }
}
