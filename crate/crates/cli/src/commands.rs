//! Argument parsing and the four single-problem subcommands.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coverbound::asymptotics::{
    asym_coverage_delta, asym_coverage_one_sample, asym_coverage_theta1, asym_coverage_theta2,
    exact_normal_coverage, LocalFrameOne, LocalFrameTwo, DEFAULT_QMC_POINTS, DEFAULT_SCRAMBLES,
};
use coverbound::bootstrap_mc::{bootstrap_cdf_diagnostic, mc_coverage, CIConfig, Scenario, Target};
use coverbound::curve::Method;
use coverbound::error::CoverError;
use coverbound::estimators::{OneSampleConstraint, TwoSampleDesign};
use coverbound::exact_enum::{
    coverage_curve_lenient, ExactConfig, ExactScenario, GridPoint, Truth,
};
use coverbound::nef::FamilySpec;
use coverbound::numerics::QmcSpec;
use coverbound::rng::RngState;
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::figures::{run_figure, two_sample_truth, FigureId, FigureJob, Overrides, DEFAULT_SEED};
use crate::grid::Grid;
use crate::output::{self, format_sig, CsvRow};

#[derive(Debug, Parser)]
#[command(
    name = "coverbound",
    version,
    about = "Coverage of bootstrap percentile intervals under boundary and ordering constraints"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact coverage by enumerating the bootstrap law (Poisson, binomial; normal in closed form).
    ExactCoverage(ProblemArgs),
    /// Local-asymptotic coverage over a grid of the local parameter.
    AsymCoverage(AsymArgs),
    /// Monte Carlo coverage of the simulated percentile interval.
    McCoverage(McArgs),
    /// Distance between the bootstrap law of the standardized mean and the normal limit.
    Diagnostics(DiagArgs),
    /// Write the data behind one figure (or all of them) as CSV.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Normal,
    Poisson,
    Binomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Theta,
    Theta1,
    Theta2,
    Delta,
}

impl TargetArg {
    fn two_sample(self) -> Option<Target> {
        match self {
            TargetArg::Theta => None,
            TargetArg::Theta1 => Some(Target::Theta1),
            TargetArg::Theta2 => Some(Target::Theta2),
            TargetArg::Delta => Some(Target::Delta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotArg {
    Gnuplot,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyFlags {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Binomial number of trials.
    #[arg(long)]
    pub m: Option<u32>,
    /// Normal variance.
    #[arg(long)]
    pub variance: Option<f64>,
}

impl FamilyFlags {
    /// The family, if `--family` was given, after checking its parameters.
    fn resolve(&self) -> Result<Option<FamilySpec>> {
        let Some(family) = self.family else {
            if self.m.is_some() {
                return Err(CliError::validation("--m requires --family binomial"));
            }
            if self.variance.is_some() {
                return Err(CliError::validation("--variance requires --family normal"));
            }
            return Ok(None);
        };
        if self.m.is_some() && family != FamilyArg::Binomial {
            return Err(CliError::validation(
                "--m conflicts with --family other than binomial",
            ));
        }
        if self.variance.is_some() && family != FamilyArg::Normal {
            return Err(CliError::validation(
                "--variance conflicts with --family other than normal",
            ));
        }
        Ok(Some(match family {
            FamilyArg::Normal => FamilySpec::normal(self.variance.unwrap_or(1.0))?,
            FamilyArg::Poisson => FamilySpec::Poisson,
            FamilyArg::Binomial => FamilySpec::binomial(self.m.unwrap_or(1))?,
        }))
    }

    fn require(&self) -> Result<FamilySpec> {
        self.resolve()?
            .ok_or_else(|| CliError::validation("--family is required"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct LevelFlags {
    #[arg(long, default_value_t = 0.05)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha2: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[command(flatten)]
    pub family: FamilyFlags,
    /// Lower bound of θ (one-sample).
    #[arg(long)]
    pub d: Option<f64>,
    /// One-sample size.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub n1: Option<u64>,
    #[arg(long)]
    pub n2: Option<u64>,
    /// Overall mean η₀ of the two-sample frame θ₁₀ = η₀ − (1 − ω)Δ₀, θ₂₀ = η₀ + ωΔ₀.
    #[arg(long)]
    pub eta0: Option<f64>,
    #[arg(long, value_enum)]
    pub target: Option<TargetArg>,
    #[command(flatten)]
    pub level: LevelFlags,
    /// θ₀ grid (one-sample) or Δ₀ grid (two-sample) as START:END:STEP.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    /// A single one-sample θ₀ instead of a grid.
    #[arg(long)]
    pub theta0: Option<f64>,
    /// Percentile interval of the unconstrained MLE.
    #[arg(long)]
    pub unconstrained: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Bootstrap replicates per interval.
    #[arg(long = "B", default_value_t = CIConfig::DEFAULT_B)]
    pub b: usize,
    /// Simulated datasets per grid point.
    #[arg(long, default_value_t = 10_000)]
    pub reps: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct AsymArgs {
    /// One-sample boundary problem; the grid is over τ.
    #[arg(long)]
    pub one_sample: bool,
    /// Limiting standard deviation; otherwise derived from --family at --d or --eta0.
    #[arg(long)]
    pub sigma0: Option<f64>,
    #[command(flatten)]
    pub family: FamilyFlags,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub eta0: Option<f64>,
    /// Share n₁/n of the first sample; otherwise taken from --n1 and --n2.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub n1: Option<u64>,
    #[arg(long)]
    pub n2: Option<u64>,
    #[arg(long, value_enum)]
    pub target: Option<TargetArg>,
    #[command(flatten)]
    pub level: LevelFlags,
    /// Grid of τ (one-sample) or δ (two-sample).
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Grid,
    #[arg(long, default_value_t = DEFAULT_QMC_POINTS)]
    pub qmc_points: u64,
    #[arg(long, default_value_t = DEFAULT_SCRAMBLES)]
    pub scrambles: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DiagArgs {
    #[command(flatten)]
    pub family: FamilyFlags,
    #[arg(long)]
    pub n: u64,
    /// The fitted mean the bootstrap resamples from.
    #[arg(long)]
    pub theta0: f64,
    /// Probe points of the standardized scale.
    #[arg(long, default_value = "-3:3:0.25", allow_hyphen_values = true)]
    pub grid: Grid,
    #[arg(long = "B", default_value_t = CIConfig::DEFAULT_B)]
    pub b: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// fig1a, fig1b, fig2a, fig2b, fig3, fig4, fig5, fig6 or all.
    pub id: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub qmc_points: Option<u64>,
    #[arg(long)]
    pub scrambles: Option<usize>,
    #[arg(long, value_enum)]
    pub plot: Option<PlotArg>,
}

/// A resolved exact or Monte Carlo problem.
#[derive(Debug, Clone, Copy)]
enum Problem {
    One {
        family: FamilySpec,
        d: f64,
        n: u64,
    },
    Two {
        family: FamilySpec,
        design: TwoSampleDesign,
        eta0: f64,
        target: Target,
    },
}

fn conflict(a: &str, b: &str) -> CliError {
    CliError::validation(format!("{a} conflicts with {b}"))
}

impl ProblemArgs {
    fn resolve(&self) -> Result<(Problem, Vec<f64>)> {
        let family = self.family.require()?;
        let two = self.n1.is_some() || self.n2.is_some();
        let problem = if two {
            if self.n.is_some() {
                return Err(conflict("--n", "--n1/--n2"));
            }
            if self.d.is_some() {
                return Err(conflict("--d", "--n1/--n2"));
            }
            if self.theta0.is_some() {
                return Err(conflict("--theta0", "--n1/--n2"));
            }
            let (Some(n1), Some(n2)) = (self.n1, self.n2) else {
                return Err(CliError::validation("--n1 and --n2 must be given together"));
            };
            let target = match self.target {
                None => return Err(CliError::validation("--target is required with --n1/--n2")),
                Some(t) => t
                    .two_sample()
                    .ok_or_else(|| conflict("--target theta", "--n1/--n2"))?,
            };
            let eta0 = self
                .eta0
                .ok_or_else(|| CliError::validation("--eta0 is required with --n1/--n2"))?;
            Problem::Two {
                family,
                design: TwoSampleDesign::new(n1, n2)?,
                eta0,
                target,
            }
        } else {
            let n = self.n.ok_or_else(|| {
                CliError::validation("give --n (one-sample) or --n1 and --n2 (two-sample)")
            })?;
            if self.eta0.is_some() {
                return Err(conflict("--eta0", "--n"));
            }
            if let Some(t) = self.target.filter(|t| *t != TargetArg::Theta) {
                return Err(conflict(
                    &format!("--target {}", t.to_possible_value().unwrap().get_name()),
                    "--n",
                ));
            }
            let d = match (self.d, self.unconstrained) {
                (Some(d), _) => d,
                (None, true) => f64::NEG_INFINITY,
                (None, false) => {
                    return Err(CliError::validation(
                        "--d is required unless --unconstrained",
                    ))
                }
            };
            if n == 0 {
                return Err(CliError::validation("--n must be positive"));
            }
            Problem::One { family, d, n }
        };
        let params = match (self.grid, self.theta0) {
            (Some(_), Some(_)) => return Err(conflict("--grid", "--theta0")),
            (Some(g), None) => g.values(),
            (None, Some(t)) => Grid::point(t)?.values(),
            (None, None) => return Err(CliError::validation("give --grid or --theta0")),
        };
        Ok((problem, params))
    }

    fn method(&self, exact: bool) -> Method {
        match (exact, self.unconstrained) {
            (true, false) => Method::Exact,
            (true, true) => Method::ExactUnconstrained,
            (false, _) => Method::MonteCarlo,
        }
    }
}

fn base_row(problem: &Problem, method: Method, level: &LevelFlags) -> CsvRow {
    let (target, family, n1, n2, param_name) = match *problem {
        Problem::One { family, n, .. } => ("theta", family, Some(n), None, "theta0"),
        Problem::Two {
            family,
            design,
            target,
            ..
        } => (
            target.label(),
            family,
            Some(design.n1()),
            Some(design.n2()),
            "Delta0",
        ),
    };
    CsvRow {
        figure_id: None,
        panel: None,
        method,
        target,
        family: Some(family.to_string()),
        n1,
        n2,
        param_name,
        param_value: 0.0,
        coverage: 0.0,
        error_estimate: None,
        alpha1: level.alpha1,
        alpha2: level.alpha2,
        seed: None,
    }
}

/// Reports grid points that failed on standard error and keeps the rest;
/// fails outright when no point succeeded.
fn report_failures(failures: &[(f64, String)], succeeded: usize) -> Result<()> {
    if succeeded == 0 {
        if let Some((x, msg)) = failures.first() {
            return Err(CliError::validation(format!(
                "at {}: {msg}",
                format_sig(*x)
            )));
        }
    }
    for (x, msg) in failures {
        eprintln!("warning: skipped grid point {}: {msg}", format_sig(*x));
    }
    Ok(())
}

fn exact_coverage(args: &ProblemArgs) -> Result<String> {
    let (problem, params) = args.resolve()?;
    let cfg = ExactConfig::new(args.level.alpha1, args.level.alpha2)?;
    let cfg = if args.unconstrained {
        cfg.unconstrained()
    } else {
        cfg
    };
    let template = base_row(&problem, args.method(true), &args.level);
    let mut failures = Vec::new();
    let values: Vec<(f64, f64)> = match problem {
        Problem::One {
            family: FamilySpec::NormalKnownVar { variance },
            d,
            n,
        } => {
            if args.unconstrained {
                return Err(CliError::validation(
                    "--unconstrained with --family normal has no exact enumeration; use mc-coverage",
                ));
            }
            let sd = variance.sqrt();
            let mut out = Vec::new();
            for t in params {
                match exact_normal_coverage(n, (t - d) / sd, cfg.alpha1, cfg.alpha2) {
                    Ok(c) => out.push((t, c.value())),
                    Err(e) => failures.push((t, e.to_string())),
                }
            }
            out
        }
        Problem::One { family, d, n } => {
            let scenario = ExactScenario::OneSample {
                family,
                constraint: OneSampleConstraint::new(d),
                n,
            };
            let grid: Vec<GridPoint> = params
                .iter()
                .map(|&t| GridPoint {
                    param: t,
                    truth: Truth::One(t),
                })
                .collect();
            curve_values(&scenario, &grid, &cfg, &mut failures)?
        }
        Problem::Two {
            family,
            design,
            eta0,
            target,
        } => {
            let scenario = ExactScenario::TwoSample {
                family,
                design,
                target,
            };
            let grid: Vec<GridPoint> = params
                .iter()
                .map(|&d0| {
                    let (theta10, theta20) = two_sample_truth(&design, eta0, d0);
                    GridPoint {
                        param: d0,
                        truth: Truth::Two { theta10, theta20 },
                    }
                })
                .collect();
            curve_values(&scenario, &grid, &cfg, &mut failures)?
        }
    };
    report_failures(&failures, values.len())?;
    let rows: Vec<CsvRow> = values
        .into_iter()
        .map(|(x, c)| CsvRow {
            param_value: x,
            coverage: c,
            ..template.clone()
        })
        .collect();
    Ok(output::render(&rows))
}

fn curve_values(
    scenario: &ExactScenario,
    grid: &[GridPoint],
    cfg: &ExactConfig,
    failures: &mut Vec<(f64, String)>,
) -> Result<Vec<(f64, f64)>> {
    let (curve, errors) = coverage_curve_lenient(scenario, grid, cfg)?;
    for e in errors {
        if let CoverError::GridPoint { index, source } = &e {
            failures.push((grid[*index].param, source.to_string()));
        }
    }
    Ok(curve.points.iter().map(|p| (p.param, p.coverage)).collect())
}

fn mc(args: &McArgs) -> Result<String> {
    let p = &args.problem;
    let (problem, params) = p.resolve()?;
    let cfg = CIConfig::new(p.level.alpha1, p.level.alpha2, args.b)?;
    if args.reps < 100 {
        return Err(CliError::validation(format!(
            "--reps {} must be at least 100",
            args.reps
        )));
    }
    let rng = RngState::new(args.seed);
    let template = CsvRow {
        seed: Some(args.seed),
        ..base_row(&problem, p.method(false), &p.level)
    };
    let results: Vec<(f64, Result<_, _>)> = params
        .iter()
        .map(|&x| {
            let scenario = match problem {
                Problem::One { d, n, .. } => Scenario::OneSample {
                    theta0: x,
                    n,
                    constraint: OneSampleConstraint::new(if p.unconstrained {
                        f64::NEG_INFINITY
                    } else {
                        d
                    }),
                },
                Problem::Two {
                    design,
                    eta0,
                    target,
                    ..
                } => {
                    let (theta10, theta20) = two_sample_truth(&design, eta0, x);
                    Scenario::TwoSample {
                        theta10,
                        theta20,
                        design,
                        target,
                        constrained: !p.unconstrained,
                    }
                }
            };
            let family = match problem {
                Problem::One { family, .. } | Problem::Two { family, .. } => family,
            };
            (x, mc_coverage(family, &scenario, &cfg, args.reps, &rng))
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (x, r) in results {
        match r {
            Ok(est) => rows.push(CsvRow {
                param_value: x,
                coverage: est.estimate.value(),
                error_estimate: Some(est.mc_std_error),
                ..template.clone()
            }),
            Err(e) => failures.push((x, e.to_string())),
        }
    }
    report_failures(&failures, rows.len())?;
    Ok(output::render(&rows))
}

/// Coverage, its error estimate and the knife-edge flag.
type AsymValue = (f64, Option<f64>, bool);

fn asym(args: &AsymArgs) -> Result<String> {
    let family = args.family.resolve()?;
    if args.sigma0.is_some() && family.is_some() {
        return Err(conflict("--sigma0", "--family"));
    }
    let qmc = QmcSpec::new(args.qmc_points, args.seed, true)?;
    if args.scrambles == 0 {
        return Err(CliError::validation("--scrambles must be at least 1"));
    }
    let (a1, a2) = (args.level.alpha1, args.level.alpha2);
    let sigma_at = |at: Option<f64>, flag: &str| -> Result<f64> {
        match (args.sigma0, family) {
            (Some(s), _) => Ok(s),
            (None, Some(f)) => {
                let at = at.ok_or_else(|| {
                    CliError::validation(format!("--family needs {flag} to fix sigma0"))
                })?;
                Ok(f.variance_at_mean(at)?.sqrt())
            }
            (None, None) => Err(CliError::validation("give --sigma0 or --family")),
        }
    };
    let mut template = CsvRow {
        figure_id: None,
        panel: None,
        method: Method::Asymptotic,
        target: "theta",
        family: family.map(|f| f.to_string()),
        n1: args.n1,
        n2: args.n2,
        param_name: "tau",
        param_value: 0.0,
        coverage: 0.0,
        error_estimate: None,
        alpha1: a1,
        alpha2: a2,
        seed: None,
    };
    let params = args.grid.values();
    let results: Vec<(f64, Result<AsymValue, CoverError>)> = if args.one_sample {
        for (set, flag) in [
            (args.omega.is_some(), "--omega"),
            (args.n1.is_some() || args.n2.is_some(), "--n1/--n2"),
            (args.eta0.is_some(), "--eta0"),
        ] {
            if set {
                return Err(conflict(flag, "--one-sample"));
            }
        }
        if let Some(t) = args.target.filter(|t| *t != TargetArg::Theta) {
            return Err(conflict(
                &format!("--target {}", t.to_possible_value().unwrap().get_name()),
                "--one-sample",
            ));
        }
        let sigma = sigma_at(args.d, "--d")?;
        params
            .par_iter()
            .map(|&tau| {
                let r = LocalFrameOne::new(tau, sigma)
                    .and_then(|f| asym_coverage_one_sample(&f, a1, a2))
                    .map(|c| (c.coverage.value(), None, c.at_boundary));
                (tau, r)
            })
            .collect()
    } else {
        if args.d.is_some() {
            return Err(conflict("--d", "two-sample --omega/--n1/--n2"));
        }
        let omega = match (args.omega, args.n1, args.n2) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(conflict("--omega", "--n1/--n2"))
            }
            (Some(w), None, None) => w,
            (None, Some(n1), Some(n2)) => TwoSampleDesign::new(n1, n2)?.omega(),
            (None, None, None) => {
                return Err(CliError::validation(
                    "give --one-sample, or --omega or --n1 and --n2 for two-sample",
                ))
            }
            _ => return Err(CliError::validation("--n1 and --n2 must be given together")),
        };
        let target = match args.target {
            None => return Err(CliError::validation("--target is required for two-sample")),
            Some(t) => t
                .two_sample()
                .ok_or_else(|| conflict("--target theta", "two-sample --omega/--n1/--n2"))?,
        };
        let sigma = sigma_at(args.eta0, "--eta0")?;
        let base = LocalFrameTwo::new(0.0, omega, sigma, args.eta0.unwrap_or(0.0))?;
        template.target = target.label();
        template.param_name = "delta";
        if target != Target::Delta {
            template.seed = Some(args.seed);
        }
        params
            .par_iter()
            .map(|&delta| {
                let r = base.with_delta(delta).and_then(|f| match target {
                    Target::Delta => asym_coverage_delta(&f, a1, a2)
                        .map(|c| (c.coverage.value(), None, c.at_boundary)),
                    Target::Theta1 => asym_coverage_theta1(&f, a1, a2, &qmc, args.scrambles)
                        .map(|q| (q.coverage.value(), Some(q.error_estimate), false)),
                    Target::Theta2 => asym_coverage_theta2(&f, a1, a2, &qmc, args.scrambles)
                        .map(|q| (q.coverage.value(), Some(q.error_estimate), false)),
                });
                (delta, r)
            })
            .collect()
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (x, r) in results {
        match r {
            Ok((c, err, at_boundary)) => {
                if at_boundary {
                    eprintln!(
                        "warning: {} sits on the threshold where the limit is undefined; lower branch reported",
                        format_sig(x)
                    );
                }
                rows.push(CsvRow {
                    param_value: x,
                    coverage: c,
                    error_estimate: err,
                    ..template.clone()
                });
            }
            Err(e) => failures.push((x, e.to_string())),
        }
    }
    report_failures(&failures, rows.len())?;
    Ok(output::render(&rows))
}

pub const DIAGNOSTICS_HEADER: &str = "family,n,theta_hat,probe,abs_deviation,B,seed";

fn diagnostics(args: &DiagArgs) -> Result<String> {
    let family = args.family.require()?;
    let rows = bootstrap_cdf_diagnostic(
        family,
        args.theta0,
        args.n,
        &args.grid.values(),
        args.b,
        &RngState::new(args.seed),
    )?;
    let mut text = String::from(DIAGNOSTICS_HEADER);
    text.push('\n');
    for (x, dev) in rows {
        text.push_str(&format!(
            "{family},{},{},{},{},{},{}\n",
            args.n,
            format_sig(args.theta0),
            format_sig(x),
            format_sig(dev),
            args.b,
            args.seed
        ));
    }
    Ok(text)
}

fn figure(args: &FigureArgs) -> Result<String> {
    let ids: Vec<FigureId> = if args.id == "all" {
        if args.grid.is_some() {
            return Err(conflict("--grid", "figure all"));
        }
        FigureId::ALL.to_vec()
    } else {
        vec![args.id.parse()?]
    };
    let mut listing = String::new();
    for figure in ids {
        let job = FigureJob {
            figure,
            output_dir: args.out.clone(),
            overrides: Overrides {
                grid: args.grid,
                alpha1: args.alpha1,
                alpha2: args.alpha2,
                seed: args.seed,
                qmc_points: args.qmc_points,
                scrambles: args.scrambles,
            },
            plot: args.plot.is_some(),
        };
        for path in run_figure(&job)? {
            listing.push_str(&format!("{}\n", path.display()));
        }
    }
    Ok(listing)
}

/// Runs a parsed command, writing its output.
pub fn run(cli: &Cli) -> Result<()> {
    let (text, out) = match &cli.command {
        Command::ExactCoverage(a) => (exact_coverage(a)?, a.out.as_deref()),
        Command::McCoverage(a) => (mc(a)?, a.problem.out.as_deref()),
        Command::AsymCoverage(a) => (asym(a)?, a.out.as_deref()),
        Command::Diagnostics(a) => (diagnostics(a)?, a.out.as_deref()),
        Command::Figure(a) => (figure(a)?, None),
    };
    output::emit(&text, out)
}
