//! Bayesian estimation by random-walk Metropolis.
//!
//! The sampler moves on the same unconstrained scale as the maximum-likelihood
//! fit, `θ = (ln ξ₁, ln ξ₂, atanh δ)`, one coordinate at a time, with the
//! log-Jacobian of the map added to the target. Step sizes are either given or
//! tuned during burn-in and then frozen, so the recorded phase runs a fixed kernel.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bitl::BitlParams;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{moment_start, transform, PreparedLikelihood};
use crate::stats;

/// Independent priors: `ξᵢ ~ Exponential(rate)` and `δ ~ Uniform[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub xi_rate: f64,
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self { xi_rate: 0.01 }
    }
}

impl PriorSpec {
    pub fn new(xi_rate: f64) -> Result<Self> {
        if !(xi_rate.is_finite() && xi_rate > 0.0) {
            return Err(Error::Domain(format!(
                "prior rate must be positive and finite, got {xi_rate}"
            )));
        }
        Ok(Self { xi_rate })
    }

    pub fn ln_density(&self, p: &BitlParams) -> f64 {
        let r = self.xi_rate;
        2.0 * r.ln() - r * (p.xi1() + p.xi2()) + 0.5f64.ln()
    }
}

/// `loglik + ln prior` at raw parameter values; `-inf` outside the prior support.
pub fn log_posterior(values: [f64; 3], d: &Dataset, pr: &PriorSpec) -> Result<f64> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain(format!("NaN parameter in {values:?}")));
    }
    let Ok(p) = BitlParams::new(values[0], values[1], values[2]) else {
        return Ok(f64::NEG_INFINITY);
    };
    Ok(crate::estimate::loglik(&p, d)? + pr.ln_density(&p))
}

/// One Metropolis update with a symmetric proposal. Returns whether the
/// proposal was accepted; `current` and `current_lp` are updated in place.
pub fn metropolis_step<S, R, F>(
    current: &mut S,
    current_lp: &mut f64,
    proposal: S,
    log_target: F,
    rng: &mut R,
) -> bool
where
    R: Rng + ?Sized,
    F: FnOnce(&S) -> f64,
{
    let lp = log_target(&proposal);
    if lp.is_nan() || lp == f64::NEG_INFINITY {
        return false;
    }
    let log_ratio = lp - *current_lp;
    let accept = log_ratio >= 0.0 || {
        let u: f64 = rng.random();
        u.ln() < log_ratio
    };
    if accept {
        *current = proposal;
        *current_lp = lp;
    }
    accept
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcControl {
    /// Total iterations, burn-in included.
    pub iters: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Per-coordinate proposal scales on the θ scale; `None` tunes them during burn-in.
    pub step: Option<[f64; 3]>,
    pub seed: u64,
    /// Holds `δ` fixed (e.g. at 0 for the independence submodel).
    pub fixed_delta: Option<f64>,
}

impl Default for McmcControl {
    fn default() -> Self {
        Self {
            iters: 20_000,
            burn_in: 5_000,
            thin: 1,
            step: None,
            seed: 1,
            fixed_delta: None,
        }
    }
}

const TUNE_BATCH: usize = 50;
const TUNE_TARGET: f64 = 0.3;
const TUNE_FACTOR: f64 = 1.1;
const INITIAL_STEP: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    /// Retained draws `(ξ₁, ξ₂, δ)`.
    pub draws: Vec<[f64; 3]>,
    /// Log-likelihood at each retained draw.
    pub loglik: Vec<f64>,
    /// Fraction of accepted coordinate moves in the recorded phase.
    pub accept_rate: f64,
    pub seed: u64,
    pub burn_in: usize,
    pub thin: usize,
    /// Proposal scales used in the recorded phase.
    pub step: [f64; 3],
}

impl Chain {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// CSV with header `xi1,xi2,delta,loglik`, one row per retained draw.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "xi1,xi2,delta,loglik")?;
        for (d, l) in self.draws.iter().zip(&self.loglik) {
            writeln!(w, "{},{},{},{}", d[0], d[1], d[2], l)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn run_chain(d: &Dataset, pr: &PriorSpec, ctl: &McmcControl) -> Result<Chain> {
    if ctl.iters <= ctl.burn_in {
        return Err(Error::Usage(format!(
            "iterations ({}) must exceed burn-in ({})",
            ctl.iters, ctl.burn_in
        )));
    }
    if ctl.thin == 0 {
        return Err(Error::Usage("thin must be at least 1".into()));
    }
    if let Some(s) = ctl.step {
        if s.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Usage(format!("step sizes must be positive, got {s:?}")));
        }
    }
    PriorSpec::new(pr.xi_rate)?;
    if let Some(fd) = ctl.fixed_delta {
        if !(fd > -1.0 && fd < 1.0) {
            return Err(Error::Usage(format!("fixed delta must lie in (-1, 1), got {fd}")));
        }
    }

    let lik = PreparedLikelihood::new(d);
    let free = if ctl.fixed_delta.is_some() { 2 } else { 3 };
    let target = |theta: &[f64; 3]| -> f64 {
        let Ok(p) = transform::from_theta(theta) else {
            return f64::NEG_INFINITY;
        };
        lik.eval(&p) + pr.ln_density(&p) + transform::ln_jacobian(theta)
    };

    let mut start = moment_start(d).unwrap_or(BitlParams::new(1.0, 1.0, 0.0)?);
    if let Some(fd) = ctl.fixed_delta {
        start = BitlParams::new(start.xi1(), start.xi2(), fd)?;
    }
    let mut theta = transform::to_theta(&start);
    let mut lp = target(&theta);
    if !lp.is_finite() {
        return Err(Error::Fit("log posterior is not finite at the starting point".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(ctl.seed);
    let tuning = ctl.step.is_none();
    let mut step = ctl.step.unwrap_or([INITIAL_STEP; 3]);
    let mut batch_accepts = [0usize; 3];

    let kept = (ctl.iters - ctl.burn_in).div_ceil(ctl.thin);
    let mut draws = Vec::with_capacity(kept);
    let mut logliks = Vec::with_capacity(kept);
    let (mut accepted, mut proposed) = (0usize, 0usize);

    for it in 0..ctl.iters {
        let recording = it >= ctl.burn_in;
        for k in 0..free {
            let z: f64 = rng.sample(StandardNormal);
            let mut prop = theta;
            prop[k] += step[k] * z;
            let ok = metropolis_step(&mut theta, &mut lp, prop, target, &mut rng);
            if recording {
                proposed += 1;
                accepted += ok as usize;
            } else {
                batch_accepts[k] += ok as usize;
            }
        }
        if !recording && tuning && (it + 1) % TUNE_BATCH == 0 {
            for k in 0..free {
                let rate = batch_accepts[k] as f64 / TUNE_BATCH as f64;
                if rate > TUNE_TARGET {
                    step[k] *= TUNE_FACTOR;
                } else {
                    step[k] /= TUNE_FACTOR;
                }
                batch_accepts[k] = 0;
            }
        }
        if recording && (it - ctl.burn_in).is_multiple_of(ctl.thin) {
            let p = transform::from_theta(&theta)?;
            draws.push(p.as_array());
            logliks.push(lik.eval(&p));
        }
    }

    Ok(Chain {
        draws,
        loglik: logliks,
        accept_rate: if proposed == 0 { 0.0 } else { accepted as f64 / proposed as f64 },
        seed: ctl.seed,
        burn_in: ctl.burn_in,
        thin: ctl.thin,
        step,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub mean: f64,
    pub median: f64,
    /// Equal-tailed 95% credible interval.
    pub lower: f64,
    pub upper: f64,
    pub ess: f64,
}

impl ParamSummary {
    pub fn covers(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub xi1: ParamSummary,
    pub xi2: ParamSummary,
    pub delta: ParamSummary,
    pub accept_rate: f64,
    pub draws: usize,
    /// Posterior mean deviance `D̄`, with `D = -2 loglik`.
    pub mean_deviance: f64,
    /// Effective number of parameters `D̄ - D(θ̄)`.
    pub p_d: f64,
    pub dic: f64,
}

pub const MIN_SUMMARY_DRAWS: usize = 100;

/// Effective sample size with Geyer's initial positive sequence truncation.
pub fn effective_sample_size(xs: &[f64]) -> f64 {
    let n = xs.len();
    let m = stats::mean(xs);
    let centered: Vec<f64> = xs.iter().map(|x| x - m).collect();
    let autocov = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
    };
    let g0 = autocov(0);
    if g0 <= 0.0 {
        return n as f64;
    }
    let mut sum = -g0;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = autocov(lag) + autocov(lag + 1);
        if pair <= 0.0 {
            break;
        }
        sum += 2.0 * pair;
        lag += 2;
    }
    let tau = sum / g0;
    (n as f64 / tau).min(n as f64)
}

fn summarize_param(xs: &[f64]) -> ParamSummary {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    ParamSummary {
        mean: stats::mean(xs),
        median: stats::quantile_sorted(&sorted, 0.5),
        lower: stats::quantile_sorted(&sorted, 0.025),
        upper: stats::quantile_sorted(&sorted, 0.975),
        ess: effective_sample_size(xs),
    }
}

pub fn summarize(c: &Chain, d: &Dataset) -> Result<PosteriorSummary> {
    if c.len() < MIN_SUMMARY_DRAWS {
        return Err(Error::Usage(format!(
            "chain has {} retained draws; at least {MIN_SUMMARY_DRAWS} are needed for a summary",
            c.len()
        )));
    }
    let column = |k: usize| -> Vec<f64> { c.draws.iter().map(|v| v[k]).collect() };
    let (s1, s2, s3) = (
        summarize_param(&column(0)),
        summarize_param(&column(1)),
        summarize_param(&column(2)),
    );
    let mean_deviance = -2.0 * stats::mean(&c.loglik);
    let at_mean = BitlParams::new(s1.mean, s2.mean, s3.mean.clamp(-1.0, 1.0))?;
    let d_at_mean = -2.0 * PreparedLikelihood::new(d).eval(&at_mean);
    let p_d = mean_deviance - d_at_mean;
    Ok(PosteriorSummary {
        xi1: s1,
        xi2: s2,
        delta: s3,
        accept_rate: c.accept_rate,
        draws: c.len(),
        mean_deviance,
        p_d,
        dic: mean_deviance + p_d,
    })
}

impl PosteriorSummary {
    pub fn params(&self) -> [&ParamSummary; 3] {
        [&self.xi1, &self.xi2, &self.delta]
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:<6} {:>12} {:>12} {:>12} {:>12} {:>10}\n",
            "param", "mean", "median", "2.5%", "97.5%", "ESS"
        );
        for (name, p) in ["xi1", "xi2", "delta"].iter().zip(self.params()) {
            s.push_str(&format!(
                "{:<6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>10.1}\n",
                name, p.mean, p.median, p.lower, p.upper, p.ess
            ));
        }
        s.push_str(&format!(
            "draws = {}, acceptance = {:.4}\nDbar = {:.4}, pD = {:.4}, DIC = {:.4}\n",
            self.draws, self.accept_rate, self.mean_deviance, self.p_d, self.dic
        ));
        s
    }
}
