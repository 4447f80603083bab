//! Maximum-likelihood estimation of `(ξ₁, ξ₂, δ)` for complete paired data.
//!
//! The optimiser works on the unconstrained scale `θ = (ln ξ₁, ln ξ₂, atanh δ)`
//! with a multistart Nelder-Mead simplex search; standard errors come from a
//! central-difference observed information matrix in the natural parameters.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::bitl::BitlParams;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::itl::{hazard_kernel, ln_ratio, ItlParams};
use crate::modelsel::information_criteria;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::stats;

/// Number of free parameters of the full model.
pub const N_PARAMS: usize = 3;

/// Maps between natural parameters and the unconstrained optimisation scale.
pub mod transform {
    use super::*;

    pub fn to_theta(p: &BitlParams) -> [f64; 3] {
        [p.xi1().ln(), p.xi2().ln(), p.delta().atanh()]
    }

    /// Inverse map. `tanh` saturates to exactly `±1` for `|θ₃| ≳ 19`, which is
    /// still inside the closed parameter box.
    pub fn from_theta(theta: &[f64; 3]) -> Result<BitlParams> {
        BitlParams::new(theta[0].exp(), theta[1].exp(), theta[2].tanh())
    }

    /// `ln |∂(ξ₁, ξ₂, δ)/∂θ| = θ₁ + θ₂ + ln(1 - tanh²θ₃)`.
    pub fn ln_jacobian(theta: &[f64; 3]) -> f64 {
        // ln sech²t = 2[ln 2 - |t| - ln(1 + e^{-2|t|})]
        let t = theta[2].abs();
        let ln_sech2 = 2.0 * (std::f64::consts::LN_2 - t - (-2.0 * t).exp().ln_1p());
        theta[0] + theta[1] + ln_sech2
    }
}

/// Log-likelihood `Σ ln f(xᵢ, yᵢ)` evaluated pair by pair from the joint density.
pub fn loglik(p: &BitlParams, d: &Dataset) -> Result<f64> {
    let mut total = 0.0;
    for o in d.pairs() {
        let l = p.ln_pdf(o.x, o.y)?;
        if l == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        total += l;
    }
    Ok(total)
}

/// Log-likelihood with the parameter-free parts of each observation cached.
///
/// `ln f(x,y) = ln 2ξ₁ + ln 2ξ₂ + c(x,y) + ξ₁ ln r(x) + ξ₂ ln r(y)
///              + ln[1 + δ(2r(x)^ξ₁ - 1)(2r(y)^ξ₂ - 1)]`
#[derive(Debug, Clone)]
pub struct PreparedLikelihood {
    lr_x: Vec<f64>,
    lr_y: Vec<f64>,
    sum_lr_x: f64,
    sum_lr_y: f64,
    sum_const: f64,
}

impl PreparedLikelihood {
    pub fn new(d: &Dataset) -> Self {
        let lr_x: Vec<f64> = d.pairs().iter().map(|o| ln_ratio(o.x)).collect();
        let lr_y: Vec<f64> = d.pairs().iter().map(|o| ln_ratio(o.y)).collect();
        let sum_const = d
            .pairs()
            .iter()
            .map(|o| hazard_kernel(o.x).ln() + hazard_kernel(o.y).ln())
            .sum();
        Self {
            sum_lr_x: lr_x.iter().sum(),
            sum_lr_y: lr_y.iter().sum(),
            lr_x,
            lr_y,
            sum_const,
        }
    }

    pub fn n(&self) -> usize {
        self.lr_x.len()
    }

    pub fn eval(&self, p: &BitlParams) -> f64 {
        let (a, b, delta) = (p.xi1(), p.xi2(), p.delta());
        let n = self.n() as f64;
        let mut ll = n * ((2.0 * a).ln() + (2.0 * b).ln())
            + self.sum_const
            + a * self.sum_lr_x
            + b * self.sum_lr_y;
        if delta != 0.0 {
            for (lx, ly) in self.lr_x.iter().zip(&self.lr_y) {
                let s1 = (a * lx).exp();
                let s2 = (b * ly).exp();
                ll += (delta * (2.0 * s1 - 1.0) * (2.0 * s2 - 1.0)).ln_1p();
            }
        }
        if ll.is_nan() {
            f64::NEG_INFINITY
        } else {
            ll
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Total number of starting points (the data-driven start plus jittered copies).
    pub starts: usize,
    /// Convergence threshold on the simplex diameter in θ-space.
    pub tol: f64,
    /// Objective-evaluation cap per start.
    pub max_evals: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            starts: 5,
            tol: 1e-8,
            max_evals: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: BitlParams,
    pub loglik: f64,
    pub se: Option<[f64; 3]>,
    pub aic: f64,
    pub bic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub boundary_flag: bool,
}

/// Data-driven start: marginal medians inverted for `ξᵢ`, and `δ = 9τ̂/2`
/// from the sample Kendall tau, clamped to `[-0.99, 0.99]`.
pub fn moment_start(d: &Dataset) -> Result<BitlParams> {
    let (xs, ys) = (d.xs(), d.ys());
    let xi1 = ItlParams::from_median(stats::median(&xs))?.shape();
    let xi2 = ItlParams::from_median(stats::median(&ys))?.shape();
    let delta = stats::kendall_tau(&xs, &ys)
        .map(|t| (4.5 * t).clamp(-0.99, 0.99))
        .unwrap_or(0.0);
    BitlParams::new(xi1, xi2, delta)
}

/// Deterministic jitter pattern for the additional starts, in θ units.
const JITTER: [[f64; 3]; 4] = [
    [0.4, 0.4, -0.6],
    [-0.4, -0.4, 0.6],
    [0.4, -0.4, 0.3],
    [-0.4, 0.4, -0.3],
];

pub fn starting_points(d: &Dataset, starts: usize) -> Result<Vec<[f64; 3]>> {
    let base = transform::to_theta(&moment_start(d)?);
    Ok((0..starts.max(1))
        .map(|i| {
            if i == 0 {
                return base;
            }
            let j = JITTER[(i - 1) % JITTER.len()];
            let grow = 1.0 + ((i - 1) / JITTER.len()) as f64;
            [
                base[0] + grow * j[0],
                base[1] + grow * j[1],
                base[2] + grow * j[2],
            ]
        })
        .collect())
}

fn check_fit_data(d: &Dataset) -> Result<()> {
    if d.len() < 4 {
        return Err(Error::Fit(format!(
            "need at least 4 observations to fit 3 parameters, got {}",
            d.len()
        )));
    }
    let first = d.pairs()[0];
    if d.pairs().iter().all(|o| o.x == first.x) || d.pairs().iter().all(|o| o.y == first.y) {
        return Err(Error::Fit(
            "degenerate data: a margin has all observations identical".into(),
        ));
    }
    Ok(())
}

/// Maximum-likelihood fit of the full three-parameter model.
pub fn fit_mle(d: &Dataset, opts: &FitOptions) -> Result<FitResult> {
    if opts.starts == 0 || opts.max_evals == 0 || opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Usage(format!("invalid fit options {opts:?}")));
    }
    check_fit_data(d)?;
    let lik = PreparedLikelihood::new(d);
    let objective = |theta: &[f64; 3]| -> f64 {
        match transform::from_theta(theta) {
            Ok(p) => -lik.eval(&p),
            Err(_) => f64::INFINITY,
        }
    };
    let nm = NelderMeadOptions {
        tol: opts.tol,
        max_evals: opts.max_evals,
        initial_step: 0.2,
    };

    let mut best: Option<crate::optim::NelderMeadResult<3>> = None;
    for start in starting_points(d, opts.starts)? {
        let r = nelder_mead(objective, start, &nm);
        log::debug!(
            "start {start:?}: -loglik {} after {} evals (converged: {})",
            r.f,
            r.evals,
            r.converged
        );
        if best.as_ref().is_none_or(|b| r.f < b.f) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one start");
    if !best.f.is_finite() {
        return Err(Error::Fit(
            "log-likelihood is not finite at any starting point".into(),
        ));
    }

    let params = transform::from_theta(&best.x)?;
    let loglik = lik.eval(&params);
    let boundary_flag = params.delta().abs() > 0.999;
    let se = std_errors(&params, d);
    let ic = information_criteria(loglik, N_PARAMS, d.len());
    if !best.converged {
        log::warn!("simplex search hit the evaluation cap before converging");
    }
    Ok(FitResult {
        params,
        loglik,
        se,
        aic: ic.aic,
        bic: ic.bic,
        converged: best.converged,
        iterations: best.iterations,
        boundary_flag,
    })
}

fn steps(p: &BitlParams) -> [f64; 3] {
    p.as_array().map(|v| 1e-4 * v.abs().max(1e-2))
}

/// Central-difference Hessian of the log-likelihood in `(ξ₁, ξ₂, δ)`.
///
/// Fails when a difference stencil leaves the parameter box.
pub fn loglik_hessian(p: &BitlParams, d: &Dataset) -> Result<Matrix3<f64>> {
    let lik = PreparedLikelihood::new(d);
    let h = steps(p);
    let at = |v: [f64; 3]| -> Result<f64> { Ok(lik.eval(&BitlParams::new(v[0], v[1], v[2])?)) };
    let base = p.as_array();
    let shifted = |i: usize, si: f64, j: usize, sj: f64| -> Result<f64> {
        let mut v = base;
        v[i] += si * h[i];
        v[j] += sj * h[j];
        at(v)
    };
    let f0 = at(base)?;
    let mut hess = Matrix3::zeros();
    for i in 0..3 {
        let plus = shifted(i, 1.0, i, 0.0)?;
        let minus = shifted(i, -1.0, i, 0.0)?;
        hess[(i, i)] = (plus - 2.0 * f0 + minus) / (h[i] * h[i]);
        for j in 0..i {
            let v = (shifted(i, 1.0, j, 1.0)? - shifted(i, 1.0, j, -1.0)?
                - shifted(i, -1.0, j, 1.0)?
                + shifted(i, -1.0, j, -1.0)?)
                / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

/// Standard errors from the inverse observed information. `None` when the
/// estimate sits on the `δ` boundary or the information is not positive definite.
pub fn std_errors(p: &BitlParams, d: &Dataset) -> Option<[f64; 3]> {
    let h = steps(p);
    if p.delta().abs() + h[2] >= 1.0 {
        log::warn!("delta estimate {} is on the boundary; standard errors unavailable", p.delta());
        return None;
    }
    let hess = match loglik_hessian(p, d) {
        Ok(h) => h,
        Err(e) => {
            log::warn!("hessian evaluation failed: {e}");
            return None;
        }
    };
    let info = -hess;
    let Some(chol) = info.cholesky() else {
        log::warn!("observed information is not positive definite; standard errors unavailable");
        return None;
    };
    let cov = chol.inverse();
    let se = [cov[(0, 0)].sqrt(), cov[(1, 1)].sqrt(), cov[(2, 2)].sqrt()];
    se.iter().all(|s| s.is_finite()).then_some(se)
}
