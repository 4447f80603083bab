//! Batch driver for the BITL model: simulation, evaluation, fitting, MCMC,
//! model comparison and surface grids.
//!
//! Every command writes its primary result to `--output` when given and to
//! stdout otherwise; human-readable summaries go to stdout. Files are written
//! once, after the computation has finished.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bitl_core::bayes::{self, McmcControl, PriorSpec};
use bitl_core::data::write_pairs_csv;
use bitl_core::estimate::{fit_mle, FitOptions, FitResult};
use bitl_core::modelsel::{compare_models, FULL_LABEL, INDEPENDENCE_LABEL};
use bitl_core::{json, BitlParams, Dataset, Error, Result, SurvivalMode};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Parser)]
#[command(name = "bitl", version, about = "Bivariate inverse Topp-Leone model toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum-likelihood fit of a dataset.
    Fit(FitArgs),
    /// Random-walk Metropolis posterior sampling.
    Mcmc(McmcArgs),
    /// Simulate pairs from given parameters.
    Sim(SimArgs),
    /// Evaluate joint functions at points.
    Eval(EvalArgs),
    /// Compare the full model against the independence submodel.
    Compare(CompareArgs),
    /// Kendall's tau and Spearman's rho for a given or fitted delta.
    Dep(DepArgs),
    /// Long-format pdf/sf/hazard surface over a lattice.
    Grid(GridArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub xi1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub xi2: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<BitlParams> {
        BitlParams::new(self.xi1, self.xi2, self.delta)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OptimArgs {
    /// Number of optimiser starts.
    #[arg(long, default_value_t = 5)]
    pub starts: usize,
    /// Simplex-diameter convergence tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Objective evaluations allowed per start.
    #[arg(long, default_value_t = 2000)]
    pub max_evals: usize,
}

impl OptimArgs {
    fn options(&self) -> FitOptions {
        FitOptions {
            starts: self.starts,
            tol: self.tol,
            max_evals: self.max_evals,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Total iterations, burn-in included.
    #[arg(long, default_value_t = 20_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 5_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    /// Proposal scale on the unconstrained scale: one value or three comma-separated.
    /// Tuned during burn-in when omitted.
    #[arg(long)]
    pub step: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Rate of the exponential priors on the shape parameters.
    #[arg(long, default_value_t = 0.01)]
    pub prior_rate: f64,
}

impl ChainArgs {
    fn control(&self, fixed_delta: Option<f64>) -> Result<McmcControl> {
        Ok(McmcControl {
            iters: self.iters,
            burn_in: self.burn_in,
            thin: self.thin,
            step: self.step.as_deref().map(parse_step).transpose()?,
            seed: self.seed,
            fixed_delta,
        })
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Write the fit as JSON here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub optim: OptimArgs,
}

#[derive(Debug, Args)]
pub struct McmcArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Write the retained draws as CSV here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the posterior summary as JSON here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Hold delta fixed at this value.
    #[arg(long, allow_hyphen_values = true)]
    pub fix_delta: Option<f64>,
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Point `x,y`; repeat for several points.
    #[arg(long = "at", required = true)]
    pub at: Vec<String>,
    #[arg(long, default_value = "consistent")]
    pub survival_mode: SurvivalMode,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Write the comparison as JSON here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub optim: OptimArgs,
    /// Also run both posteriors and report DIC.
    #[arg(long)]
    pub dic: bool,
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Debug, Args)]
pub struct DepArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "input", required_unless_present = "input")]
    pub delta: Option<f64>,
    /// Fit the model to this dataset and use the estimated delta.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub optim: OptimArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Lattice `x0:x1:steps,y0:y1:steps`.
    #[arg(long)]
    pub grid: GridSpec,
    #[arg(long, default_value = "consistent")]
    pub survival_mode: SurvivalMode,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// One axis of a grid: `steps` equally spaced values from `lo` to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let h = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.hi } else { self.lo + h * i as f64 })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("grid axis `{s}` must look like lo:hi:steps"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [lo, hi, steps] = parts[..] else { return Err(bad()) };
        let lo: f64 = lo.parse().map_err(|_| bad())?;
        let hi: f64 = hi.parse().map_err(|_| bad())?;
        let steps: usize = steps.parse().map_err(|_| bad())?;
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
            return Err(Error::Usage(format!("grid range `{s}` must satisfy 0 <= lo < hi")));
        }
        if steps < 2 {
            return Err(Error::Usage(format!("grid axis `{s}` needs at least 2 steps")));
        }
        Ok(Axis { lo, hi, steps })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x: Axis,
    pub y: Axis,
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some((x, y)) = s.split_once(',') else {
            return Err(Error::Usage(format!(
                "grid `{s}` must look like x0:x1:steps,y0:y1:steps"
            )));
        };
        Ok(GridSpec { x: x.parse()?, y: y.parse()? })
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Usage(format!("point `{s}` must look like x,y"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    Ok((x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

fn parse_step(s: &str) -> Result<[f64; 3]> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Usage(format!("step `{s}` is not a number list")))?;
    match vals[..] {
        [a] => Ok([a; 3]),
        [a, b, c] => Ok([a, b, c]),
        _ => Err(Error::Usage(format!("step takes one or three values, got `{s}`"))),
    }
}

/// Process exit status for an error: 2 usage, 3 data, 4 numerical, 1 i/o.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Domain(_) => 2,
        Error::Data(_) => 3,
        Error::Fit(_) | Error::Singularity(_) => 4,
        Error::Io(_) => 1,
    }
}

fn guard_input(input: &Path, outputs: &[&Option<PathBuf>]) -> Result<()> {
    let same = |o: &Path| match (fs::canonicalize(input), fs::canonicalize(o)) {
        (Ok(a), Ok(b)) => a == b,
        _ => input == o,
    };
    for o in outputs.iter().filter_map(|o| o.as_deref()) {
        if same(o) {
            return Err(Error::Usage(format!(
                "output {} would overwrite the input file",
                o.display()
            )));
        }
    }
    Ok(())
}

fn load(path: &Path) -> Result<Dataset> {
    if !path.exists() {
        return Err(Error::Io(format!("cannot read {}: no such file", path.display())));
    }
    Dataset::load(path)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = json::to_string(value)?;
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

/// Writes `body` to `path` if given, else to `out`.
fn emit(out: &mut dyn Write, path: Option<&Path>, body: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| Error::Io(format!("cannot write {}: {e}", p.display()))),
        None => Ok(out.write_all(body)?),
    }
}

fn cell(v: Result<f64>) -> String {
    // undefined values (e.g. reversed hazard where F = 0) are left empty
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn fit_text(fit: &FitResult) -> String {
    let names = ["xi1", "xi2", "delta"];
    let mut s = String::new();
    let _ = writeln!(s, "{:<6}  {:>20}  {:>14}", "param", "estimate", "std. error");
    for (k, v) in fit.params.as_array().iter().enumerate() {
        let se = fit.se.map_or_else(|| "-".to_string(), |e| format!("{:.6}", e[k]));
        let _ = writeln!(s, "{:<6}  {:>20.10}  {:>14}", names[k], v, se);
    }
    let _ = writeln!(s, "loglik = {:.6}", fit.loglik);
    let _ = writeln!(s, "AIC = {:.6}", fit.aic);
    let _ = writeln!(s, "BIC = {:.6}", fit.bic);
    let _ = writeln!(s, "converged = {}, iterations = {}", fit.converged, fit.iterations);
    if fit.boundary_flag {
        let _ = writeln!(s, "warning: delta estimate at the boundary of [-1, 1]; standard errors not reported");
    }
    s
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Fit(a) => cmd_fit(a, out),
        Command::Mcmc(a) => cmd_mcmc(a, out),
        Command::Sim(a) => cmd_sim(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Dep(a) => cmd_dep(a, out),
        Command::Grid(a) => cmd_grid(a, out),
    }
}

fn cmd_fit(a: FitArgs, out: &mut dyn Write) -> Result<()> {
    guard_input(&a.input, &[&a.output])?;
    let d = load(&a.input)?;
    let fit = fit_mle(&d, &a.optim.options())?;
    if let Some(p) = &a.output {
        write_json(p, &fit)?;
    }
    write!(out, "n = {}\n{}", d.len(), fit_text(&fit))?;
    Ok(())
}

fn cmd_mcmc(a: McmcArgs, out: &mut dyn Write) -> Result<()> {
    guard_input(&a.input, &[&a.output, &a.summary])?;
    let d = load(&a.input)?;
    let prior = PriorSpec::new(a.chain.prior_rate)?;
    let chain = bayes::run_chain(&d, &prior, &a.chain.control(a.fix_delta)?)?;
    let summary = bayes::summarize(&chain, &d)?;
    if let Some(p) = &a.output {
        let mut buf = Vec::new();
        chain.write_csv(&mut buf)?;
        emit(out, Some(p), &buf)?;
    }
    if let Some(p) = &a.summary {
        write_json(p, &summary)?;
    }
    out.write_all(summary.to_text().as_bytes())?;
    Ok(())
}

fn cmd_sim(a: SimArgs, out: &mut dyn Write) -> Result<()> {
    let p = a.params.params()?;
    let pairs = p.sample(a.n, &mut ChaCha8Rng::seed_from_u64(a.seed))?;
    let mut buf = Vec::new();
    write_pairs_csv(&pairs, &mut buf)?;
    emit(out, a.output.as_deref(), &buf)
}

fn cmd_eval(a: EvalArgs, out: &mut dyn Write) -> Result<()> {
    let p = a.params.params()?;
    let points = a.at.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>>>()?;
    let mut s = String::from("x,y,cdf,pdf,sf,hazard,rhr,cond_x_given_y,cond_y_given_x\n");
    for (x, y) in points {
        // domain errors on the point itself are reported, not left blank
        let cdf = p.cdf(x, y)?;
        let _ = writeln!(
            s,
            "{x},{y},{cdf},{},{},{},{},{},{}",
            p.pdf(x, y)?,
            p.sf(x, y, a.survival_mode)?,
            cell(p.hazard(x, y, a.survival_mode)),
            cell(p.reversed_hazard(x, y)),
            p.conditional_pdf_x_given_y(x, y)?,
            p.conditional_pdf_y_given_x(y, x)?,
        );
    }
    emit(out, a.output.as_deref(), s.as_bytes())
}

fn cmd_compare(a: CompareArgs, out: &mut dyn Write) -> Result<()> {
    guard_input(&a.input, &[&a.output])?;
    let d = load(&a.input)?;
    let mut cmp = compare_models(&d, &a.optim.options())?;
    if a.dic {
        let prior = PriorSpec::new(a.chain.prior_rate)?;
        for (label, fixed) in [(FULL_LABEL, None), (INDEPENDENCE_LABEL, Some(0.0))] {
            let chain = bayes::run_chain(&d, &prior, &a.chain.control(fixed)?)?;
            let summary = bayes::summarize(&chain, &d)?;
            cmp.report.set_dic(label, summary.dic)?;
        }
    }
    if let Some(p) = &a.output {
        write_json(p, &cmp)?;
    }
    write!(out, "{}\n{}", cmp.report.to_text(), fit_text(&cmp.full))?;
    let ind = cmp.independence;
    writeln!(out, "independence fit: xi1 = {:.10}, xi2 = {:.10}", ind.xi1(), ind.xi2())?;
    Ok(())
}

fn cmd_dep(a: DepArgs, out: &mut dyn Write) -> Result<()> {
    let delta = match (&a.input, a.delta) {
        (Some(path), _) => {
            let fit = fit_mle(&load(path)?, &a.optim.options())?;
            writeln!(out, "delta estimated from {}", path.display())?;
            fit.params.delta()
        }
        (None, Some(d)) => d,
        (None, None) => return Err(Error::Usage("either --delta or --input is required".into())),
    };
    let dep = bitl_core::Dependence::new(delta)?;
    writeln!(out, "delta = {delta}")?;
    writeln!(out, "kendall_tau = {}", dep.kendall_tau())?;
    writeln!(out, "spearman_rho = {}", dep.spearman_rho())?;
    Ok(())
}

fn cmd_grid(a: GridArgs, out: &mut dyn Write) -> Result<()> {
    let p = a.params.params()?;
    let mut s = String::from("x,y,pdf,sf,hazard\n");
    for x in a.grid.x.values() {
        for y in a.grid.y.values() {
            let _ = writeln!(
                s,
                "{x},{y},{},{},{}",
                p.pdf(x, y)?,
                p.sf(x, y, a.survival_mode)?,
                cell(p.hazard(x, y, a.survival_mode)),
            );
        }
    }
    emit(out, a.output.as_deref(), s.as_bytes())
}
