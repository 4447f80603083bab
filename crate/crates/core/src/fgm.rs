//! Farlie-Gumbel-Morgenstern copula `C(u,v) = uv[1 + δ(1-u)(1-v)]`, `δ ∈ [-1, 1]`.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};

/// FGM dependence parameter `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dependence {
    delta: f64,
}

/// A point of the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPair {
    pub u: f64,
    pub v: f64,
}

impl UnitPair {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        check_unit("u", u)?;
        check_unit("v", v)?;
        Ok(Self { u, v })
    }
}

impl Dependence {
    pub const INDEPENDENT: Dependence = Dependence { delta: 0.0 };

    pub fn new(delta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&delta) {
            return Err(Error::Domain(format!(
                "FGM dependence must lie in [-1, 1], got {delta}"
            )));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Copula distribution function.
    pub fn cdf(&self, p: UnitPair) -> f64 {
        let UnitPair { u, v } = p;
        u * v * (1.0 + self.delta * (1.0 - u) * (1.0 - v))
    }

    /// Copula density `∂²C/∂u∂v = 1 + δ(1-2u)(1-2v)`.
    pub fn density(&self, p: UnitPair) -> f64 {
        let UnitPair { u, v } = p;
        1.0 + self.delta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v)
    }

    /// Conditional distribution of `V` given `U = u`: `∂C/∂u = v[1 + δ(1-2u)(1-v)]`.
    pub fn conditional_cdf_v(&self, u: f64, v: f64) -> Result<f64> {
        check_unit("u", u)?;
        check_unit("v", v)?;
        Ok(v * (1.0 + self.delta * (1.0 - 2.0 * u) * (1.0 - v)))
    }

    /// Inverse of [`conditional_cdf_v`](Self::conditional_cdf_v) in `v`.
    ///
    /// Solves `v + a·v(1-v) = p` with `a = δ(1-2u)`. The root in `[0,1]` is
    /// `[(1+a) - √((1+a)² - 4ap)] / 2a`, evaluated in the rationalised form
    /// `2p / [(1+a) + √((1+a)² - 4ap)]`, which has no `0/0` at `a = 0`.
    pub fn conditional_quantile_v(&self, u: f64, p: f64) -> Result<f64> {
        check_unit("u", u)?;
        check_unit("p", p)?;
        if p == 0.0 {
            return Ok(0.0);
        }
        let a = self.delta * (1.0 - 2.0 * u);
        let b = 1.0 + a;
        let disc = (b * b - 4.0 * a * p).max(0.0);
        let v = 2.0 * p / (b + disc.sqrt());
        Ok(v.clamp(0.0, 1.0))
    }

    /// Draws `(u, v)` pairs by conditional inversion.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<UnitPair> {
        (0..n)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                let w: f64 = rng.sample(Open01);
                let v = self
                    .conditional_quantile_v(u, w)
                    .expect("open-interval uniforms are valid probabilities");
                UnitPair { u, v }
            })
            .collect()
    }

    /// Kendall's tau of the FGM copula, `2δ/9`.
    pub fn kendall_tau(&self) -> f64 {
        2.0 * self.delta / 9.0
    }

    /// Spearman's rho of the FGM copula, `δ/3`.
    pub fn spearman_rho(&self) -> f64 {
        self.delta / 3.0
    }
}
