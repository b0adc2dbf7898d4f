//! Built-in figure jobs: each figure is a fixed set of panels, each panel a
//! set of coverage curves over one grid.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use coverbound::asymptotics::{
    asym_coverage_delta, asym_coverage_one_sample, asym_coverage_theta1, asym_coverage_theta2,
    exact_normal_coverage, LocalFrameOne, LocalFrameTwo, StepCoverage,
};
use coverbound::bootstrap_mc::Target;
use coverbound::curve::{CoverageCurve, CurvePoint, Method};
use coverbound::error::CoverError;
use coverbound::estimators::{OneSampleConstraint, TwoSampleDesign};
use coverbound::exact_enum::{
    coverage_curve_lenient, ExactConfig, ExactScenario, GridPoint, Truth,
};
use coverbound::nef::FamilySpec;
use coverbound::numerics::QmcSpec;
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::grid::Grid;
use crate::output::{self, format_sig, CsvRow};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 1;
/// QMC budget per asymptotic θ₁/θ₂ point in figure jobs.
pub const FIGURE_QMC_POINTS: u64 = 1 << 16;
pub const FIGURE_SCRAMBLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig1a,
        FigureId::Fig1b,
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }

    /// The grid a figure is drawn on unless overridden.
    pub fn default_grid(&self) -> Grid {
        let (a, b, h) = match self {
            FigureId::Fig1a => (2.0, 2.5, 0.0025),
            FigureId::Fig1b => (0.0, 0.3, 0.0025),
            FigureId::Fig2a => (0.0, 0.6, 0.0025),
            FigureId::Fig2b => (0.0, 4.0, 0.01),
            FigureId::Fig3 => (2.0, 2.6, 0.0025),
            FigureId::Fig4 => (0.5, 0.65, 0.001),
            FigureId::Fig5 => (0.0, 8.0, 0.05),
            FigureId::Fig6 => (0.0, 0.2975, 0.0025),
        };
        Grid::new(a, b, h).expect("built-in grids are valid")
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.label() == s)
            .ok_or_else(|| CliError::validation(format!("unknown figure '{s}'")))
    }
}

/// Optional replacements for a figure's built-in settings.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub grid: Option<Grid>,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub seed: Option<u64>,
    pub qmc_points: Option<u64>,
    pub scrambles: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct FigureJob {
    pub figure: FigureId,
    pub output_dir: PathBuf,
    pub overrides: Overrides,
    pub plot: bool,
}

/// One curve with the labels it is written under.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub panel: String,
    pub target: &'static str,
    pub family: Option<FamilySpec>,
    pub n1: Option<u64>,
    pub n2: Option<u64>,
    pub seed: Option<u64>,
    pub curve: CoverageCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    /// Letter used in the file name.
    pub tag: &'static str,
    pub param_name: &'static str,
    pub series: Vec<Series>,
}

impl Panel {
    pub fn find(&self, method: Method) -> Option<&Series> {
        self.series.iter().find(|s| s.curve.method == method)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueKind {
    Error,
    KnifeEdge,
}

/// A grid point that failed, or that sits where the limit is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub panel: String,
    pub method: Method,
    pub target: &'static str,
    pub param_value: Option<f64>,
    pub kind: IssueKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub figure: FigureId,
    pub alpha1: f64,
    pub alpha2: f64,
    pub panels: Vec<Panel>,
    pub issues: Vec<Issue>,
}

impl FigureData {
    pub fn panel(&self, tag: &str) -> Option<&Panel> {
        self.panels.iter().find(|p| p.tag == tag)
    }

    pub fn rows(&self, panel: &Panel) -> Vec<CsvRow> {
        let mut rows = Vec::new();
        for s in &panel.series {
            for p in &s.curve.points {
                rows.push(CsvRow {
                    figure_id: Some(self.figure.label().to_string()),
                    panel: Some(s.panel.clone()),
                    method: s.curve.method,
                    target: s.target,
                    family: s.family.map(|f| f.to_string()),
                    n1: s.n1,
                    n2: s.n2,
                    param_name: panel.param_name,
                    param_value: p.param,
                    coverage: p.coverage,
                    error_estimate: p.error_estimate,
                    alpha1: self.alpha1,
                    alpha2: self.alpha2,
                    seed: s.seed,
                });
            }
        }
        rows
    }

    /// File name of a panel's CSV.
    pub fn file_name(&self, panel: &Panel) -> String {
        if self.panels.len() == 1 {
            format!("{}.csv", self.figure)
        } else {
            format!("{}_{}.csv", self.figure, panel.tag)
        }
    }
}

/// Settings shared by every curve of one job.
#[derive(Debug, Clone, Copy)]
struct Ctx {
    alpha1: f64,
    alpha2: f64,
    seed: u64,
    qmc: QmcSpec,
    scrambles: usize,
}

/// Curves and issues gathered while building a panel.
#[derive(Default)]
struct Collector {
    issues: Vec<Issue>,
}

impl Collector {
    fn fail(&mut self, series: &Series, param: Option<f64>, err: &CoverError) {
        self.issues.push(Issue {
            panel: series.panel.clone(),
            method: series.curve.method,
            target: series.target,
            param_value: param,
            kind: IssueKind::Error,
            message: err.to_string(),
        });
    }

    fn knife_edge(&mut self, series: &Series, param: f64) {
        self.issues.push(Issue {
            panel: series.panel.clone(),
            method: series.curve.method,
            target: series.target,
            param_value: Some(param),
            kind: IssueKind::KnifeEdge,
            message: "limit undefined at the threshold; lower branch reported".into(),
        });
    }
}

fn series(panel: &str, method: Method, target: &'static str, family: Option<FamilySpec>) -> Series {
    Series {
        panel: panel.to_string(),
        target,
        family,
        n1: None,
        n2: None,
        seed: None,
        curve: CoverageCurve::new(method),
    }
}

fn exact_config(ctx: &Ctx, constrained: bool) -> Result<ExactConfig> {
    let cfg = ExactConfig::new(ctx.alpha1, ctx.alpha2)?;
    Ok(if constrained {
        cfg
    } else {
        cfg.unconstrained()
    })
}

/// Fills `s` from an exact sweep, recording failed points.
fn fill_exact(
    s: &mut Series,
    out: &mut Collector,
    scenario: &ExactScenario,
    grid: &[GridPoint],
    cfg: &ExactConfig,
) {
    match coverage_curve_lenient(scenario, grid, cfg) {
        Ok((curve, errors)) => {
            s.curve = curve;
            for e in errors {
                let param = match &e {
                    CoverError::GridPoint { index, .. } => Some(grid[*index].param),
                    _ => None,
                };
                out.fail(s, param, &e);
            }
        }
        Err(e) => out.fail(s, None, &e),
    }
}

/// Fills `s` by evaluating `f` at every grid coordinate in parallel.
fn fill_pointwise<F>(s: &mut Series, out: &mut Collector, params: &[f64], f: F)
where
    F: Fn(f64) -> std::result::Result<CurvePoint, CoverError> + Sync,
{
    let results: Vec<_> = params.par_iter().map(|&x| (x, f(x))).collect();
    for (x, r) in results {
        match r {
            Ok(p) => {
                if p.at_boundary {
                    out.knife_edge(s, x);
                }
                s.curve.points.push(p);
            }
            Err(e) => out.fail(s, Some(x), &e),
        }
    }
}

fn step_point(param: f64, c: StepCoverage) -> CurvePoint {
    CurvePoint {
        param,
        coverage: c.coverage.value(),
        error_estimate: None,
        at_boundary: c.at_boundary,
    }
}

fn sigma0(family: FamilySpec, at: f64) -> Result<f64> {
    Ok(family.variance_at_mean(at)?.sqrt())
}

/// Exact, unconstrained exact and asymptotic curves for a one-sample
/// boundary problem, against θ₀ with τ = √n(θ₀ − d).
fn one_sample_overlay(
    ctx: &Ctx,
    out: &mut Collector,
    tag: &'static str,
    family: FamilySpec,
    d: f64,
    n: u64,
    params: &[f64],
) -> Result<Panel> {
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
    let mut panel = Panel {
        tag,
        param_name: "theta0",
        series: Vec::new(),
    };
    for (method, constrained) in [(Method::Exact, true), (Method::ExactUnconstrained, false)] {
        let mut s = series(tag, method, "theta", Some(family));
        s.n1 = Some(n);
        fill_exact(
            &mut s,
            out,
            &scenario,
            &grid,
            &exact_config(ctx, constrained)?,
        );
        panel.series.push(s);
    }
    let sigma = sigma0(family, d)?;
    let root_n = (n as f64).sqrt();
    let mut s = series(tag, Method::Asymptotic, "theta", Some(family));
    s.n1 = Some(n);
    fill_pointwise(&mut s, out, params, |t| {
        let frame = LocalFrameOne::new(root_n * (t - d), sigma)?;
        Ok(step_point(
            t,
            asym_coverage_one_sample(&frame, ctx.alpha1, ctx.alpha2)?,
        ))
    });
    panel.series.push(s);
    Ok(panel)
}

/// True (θ₁₀, θ₂₀) at difference Δ₀ around the overall mean η₀.
pub fn two_sample_truth(design: &TwoSampleDesign, eta0: f64, delta0: f64) -> (f64, f64) {
    let w = design.omega();
    (eta0 - (1.0 - w) * delta0, eta0 + w * delta0)
}

fn two_sample_grid(design: &TwoSampleDesign, eta0: f64, params: &[f64]) -> Vec<GridPoint> {
    params
        .iter()
        .map(|&d0| {
            let (theta10, theta20) = two_sample_truth(design, eta0, d0);
            GridPoint {
                param: d0,
                truth: Truth::Two { theta10, theta20 },
            }
        })
        .collect()
}

/// Limiting coverage for one two-sample target at local difference δ.
fn asym_two_sample_point(
    ctx: &Ctx,
    frame: &LocalFrameTwo,
    target: Target,
    param: f64,
) -> Result<CurvePoint, CoverError> {
    match target {
        Target::Delta => Ok(step_point(
            param,
            asym_coverage_delta(frame, ctx.alpha1, ctx.alpha2)?,
        )),
        Target::Theta1 | Target::Theta2 => {
            let f = if target == Target::Theta1 {
                asym_coverage_theta1
            } else {
                asym_coverage_theta2
            };
            let q = f(frame, ctx.alpha1, ctx.alpha2, &ctx.qmc, ctx.scrambles)?;
            Ok(CurvePoint {
                param,
                coverage: q.coverage.value(),
                error_estimate: Some(q.error_estimate),
                at_boundary: false,
            })
        }
    }
}

const TARGETS: [Target; 3] = [Target::Theta1, Target::Theta2, Target::Delta];

fn fig1a(ctx: &Ctx, out: &mut Collector, params: &[f64]) -> Result<Vec<Panel>> {
    let family = FamilySpec::Poisson;
    let (d, n) = (2.0, 400);
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
    let mut s = series("a", Method::Exact, "theta", Some(family));
    s.n1 = Some(n);
    fill_exact(&mut s, out, &scenario, &grid, &exact_config(ctx, true)?);
    Ok(vec![Panel {
        tag: "a",
        param_name: "theta0",
        series: vec![s],
    }])
}

fn fig1b(ctx: &Ctx, out: &mut Collector, params: &[f64]) -> Result<Vec<Panel>> {
    let family = FamilySpec::binomial(1)?;
    let design = TwoSampleDesign::new(100, 300)?;
    let scenario = ExactScenario::TwoSample {
        family,
        design,
        target: Target::Theta1,
    };
    let mut s = series("b", Method::Exact, "theta1", Some(family));
    (s.n1, s.n2) = (Some(100), Some(300));
    fill_exact(
        &mut s,
        out,
        &scenario,
        &two_sample_grid(&design, 0.5, params),
        &exact_config(ctx, true)?,
    );
    Ok(vec![Panel {
        tag: "b",
        param_name: "Delta0",
        series: vec![s],
    }])
}

fn fig2a(ctx: &Ctx, out: &mut Collector, params: &[f64]) -> Result<Vec<Panel>> {
    let family = FamilySpec::normal(1.0)?;
    let mut panel = Panel {
        tag: "a",
        param_name: "theta0",
        series: Vec::new(),
    };
    for n in [20, 50, 100, 200] {
        let mut s = series("a", Method::Exact, "theta", Some(family));
        s.n1 = Some(n);
        fill_pointwise(&mut s, out, params, |t| {
            Ok(CurvePoint::exact(
                t,
                exact_normal_coverage(n, t, ctx.alpha1, ctx.alpha2)?.value(),
            ))
        });
        panel.series.push(s);
    }
    Ok(vec![panel])
}

fn fig2b(ctx: &Ctx, out: &mut Collector, params: &[f64]) -> Result<Vec<Panel>> {
    let mut s = series("b", Method::Asymptotic, "theta", None);
    fill_pointwise(&mut s, out, params, |tau| {
        let frame = LocalFrameOne::new(tau, 1.0)?;
        Ok(step_point(
            tau,
            asym_coverage_one_sample(&frame, ctx.alpha1, ctx.alpha2)?,
        ))
    });
    Ok(vec![Panel {
        tag: "b",
        param_name: "tau",
        series: vec![s],
    }])
}

fn fig3(ctx: &Ctx, out: &mut Collector, params: &[f64]) -> Result<Vec<Panel>> {
    Ok(vec![
        one_sample_overlay(ctx, out, "a", FamilySpec::Poisson, 2.0, 100, params)?,
        one_sample_overlay(ctx, out, "b", FamilySpec::Poisson, 2.0, 400, params)?,
    ])
}

fn fig4(ctx: &Ctx, out: &mut Collector, params: &[f64]) -> Result<Vec<Panel>> {
    let family = FamilySpec::binomial(1)?;
    Ok(vec![
        one_sample_overlay(ctx, out, "a", family, 0.5, 100, params)?,
        one_sample_overlay(ctx, out, "b", family, 0.5, 400, params)?,
    ])
}

/// Panel label for one ω curve of the local-asymptotic figure.
pub fn omega_panel(tag: &str, omega: f64) -> String {
    format!("{tag}/omega={}", format_sig(omega))
}

fn fig5(ctx: &Ctx, out: &mut Collector, params: &[f64]) -> Result<Vec<Panel>> {
    let mut panels = Vec::new();
    for (tag, target) in ["a", "b", "c"].into_iter().zip(TARGETS) {
        let mut panel = Panel {
            tag,
            param_name: "delta",
            series: Vec::new(),
        };
        for omega in [0.1, 0.2, 0.3, 0.5] {
            let mut s = series(
                &omega_panel(tag, omega),
                Method::Asymptotic,
                target.label(),
                None,
            );
            if target != Target::Delta {
                s.seed = Some(ctx.seed);
            }
            let base = LocalFrameTwo::new(0.0, omega, 1.0, 0.5)?;
            fill_pointwise(&mut s, out, params, |delta| {
                asym_two_sample_point(ctx, &base.with_delta(delta)?, target, delta)
            });
            panel.series.push(s);
        }
        panels.push(panel);
    }
    Ok(panels)
}

fn fig6(ctx: &Ctx, out: &mut Collector, params: &[f64]) -> Result<Vec<Panel>> {
    let family = FamilySpec::binomial(1)?;
    let eta0 = 0.5;
    let sigma = sigma0(family, eta0)?;
    let mut panels = Vec::new();
    let tags = [["a", "b", "c"], ["d", "e", "f"]];
    for ((n1, n2), tags) in [(25, 75), (100, 300)].into_iter().zip(tags) {
        let design = TwoSampleDesign::new(n1, n2)?;
        let grid = two_sample_grid(&design, eta0, params);
        let root_n = (design.total() as f64).sqrt();
        let base = LocalFrameTwo::new(0.0, design.omega(), sigma, eta0)?;
        for (tag, target) in tags.into_iter().zip(TARGETS) {
            let mut panel = Panel {
                tag,
                param_name: "Delta0",
                series: Vec::new(),
            };
            let scenario = ExactScenario::TwoSample {
                family,
                design,
                target,
            };
            for (method, constrained) in
                [(Method::Exact, true), (Method::ExactUnconstrained, false)]
            {
                let mut s = series(tag, method, target.label(), Some(family));
                (s.n1, s.n2) = (Some(n1), Some(n2));
                fill_exact(
                    &mut s,
                    out,
                    &scenario,
                    &grid,
                    &exact_config(ctx, constrained)?,
                );
                panel.series.push(s);
            }
            let mut s = series(tag, Method::Asymptotic, target.label(), Some(family));
            (s.n1, s.n2) = (Some(n1), Some(n2));
            if target != Target::Delta {
                s.seed = Some(ctx.seed);
            }
            fill_pointwise(&mut s, out, params, |d0| {
                asym_two_sample_point(ctx, &base.with_delta(root_n * d0)?, target, d0)
            });
            panel.series.push(s);
            panels.push(panel);
        }
    }
    Ok(panels)
}

/// Every curve of a figure. Failing grid points become issues; only invalid
/// overrides fail the whole job.
pub fn compute_figure(figure: FigureId, overrides: &Overrides) -> Result<FigureData> {
    let alpha1 = overrides.alpha1.unwrap_or(DEFAULT_ALPHA);
    let alpha2 = overrides.alpha2.unwrap_or(DEFAULT_ALPHA);
    ExactConfig::new(alpha1, alpha2)?;
    let seed = overrides.seed.unwrap_or(DEFAULT_SEED);
    let scrambles = overrides.scrambles.unwrap_or(FIGURE_SCRAMBLES);
    if scrambles == 0 {
        return Err(CliError::validation("--scrambles must be at least 1"));
    }
    let ctx = Ctx {
        alpha1,
        alpha2,
        seed,
        qmc: QmcSpec::new(
            overrides.qmc_points.unwrap_or(FIGURE_QMC_POINTS),
            seed,
            true,
        )?,
        scrambles,
    };
    let params = overrides
        .grid
        .unwrap_or_else(|| figure.default_grid())
        .values();
    let mut out = Collector::default();
    let build = match figure {
        FigureId::Fig1a => fig1a,
        FigureId::Fig1b => fig1b,
        FigureId::Fig2a => fig2a,
        FigureId::Fig2b => fig2b,
        FigureId::Fig3 => fig3,
        FigureId::Fig4 => fig4,
        FigureId::Fig5 => fig5,
        FigureId::Fig6 => fig6,
    };
    let panels = build(&ctx, &mut out, &params)?;
    Ok(FigureData {
        figure,
        alpha1,
        alpha2,
        panels,
        issues: out.issues,
    })
}

pub const ISSUE_HEADER: &str = "figure_id,panel,method,target,param_value,kind,message";

/// The errors sidecar: one line per issue, commas in messages replaced.
pub fn render_issues(data: &FigureData) -> String {
    let mut text = String::from(ISSUE_HEADER);
    text.push('\n');
    for i in &data.issues {
        let kind = match i.kind {
            IssueKind::Error => "error",
            IssueKind::KnifeEdge => "knife_edge",
        };
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            data.figure,
            i.panel,
            i.method,
            i.target,
            i.param_value.map(format_sig).unwrap_or_default(),
            kind,
            i.message.replace([',', '\n', '\r'], ";"),
        ));
    }
    text
}

/// A gnuplot script drawing each panel from its CSV by relative path.
pub fn render_gnuplot(data: &FigureData) -> String {
    let mut s = String::from("set datafile separator ','\nset terminal pngcairo size 900,600\nset ylabel 'coverage'\nset key bottom right\n");
    for panel in &data.panels {
        let csv = data.file_name(panel);
        s.push_str(&format!(
            "\nset output '{}.png'\nset xlabel '{}'\nplot \\\n",
            csv.trim_end_matches(".csv"),
            panel.param_name
        ));
        let mut lines = Vec::new();
        for series in &panel.series {
            let n = series.n1.map(|n| format!(" n1={n}")).unwrap_or_default();
            lines.push(format!(
                "  '{csv}' every ::1 using 9:((strcol(2) eq '{p}' && strcol(3) eq '{m}' && strcol(6) eq '{n1}') ? $10 : 1/0) with lines title '{p} {m}{n}'",
                p = series.panel,
                m = series.curve.method,
                n1 = series.n1.map(|n| n.to_string()).unwrap_or_default(),
            ));
        }
        s.push_str(&lines.join(", \\\n"));
        s.push('\n');
    }
    s
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Computes a figure and writes one CSV per panel, the errors sidecar and,
/// if asked, a gnuplot script. Returns the paths written.
pub fn run_figure(job: &FigureJob) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&job.output_dir).map_err(|e| CliError::io(&job.output_dir, e))?;
    let data = compute_figure(job.figure, &job.overrides)?;
    let mut written = Vec::new();
    for panel in &data.panels {
        let path = job.output_dir.join(data.file_name(panel));
        write(&path, &output::render(&data.rows(panel)))?;
        written.push(path);
    }
    let sidecar = job.output_dir.join(format!("{}_errors.csv", data.figure));
    write(&sidecar, &render_issues(&data))?;
    written.push(sidecar);
    if job.plot {
        let script = job.output_dir.join(format!("{}.gp", data.figure));
        write(&script, &render_gnuplot(&data))?;
        written.push(script);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.label().parse::<FigureId>().unwrap(), id);
        }
        assert!("fig7".parse::<FigureId>().is_err());
    }

    #[test]
    fn default_grid_sizes() {
        assert_eq!(FigureId::Fig1a.default_grid().len(), 201);
        assert_eq!(FigureId::Fig2b.default_grid().len(), 401);
        assert_eq!(FigureId::Fig4.default_grid().len(), 151);
        assert_eq!(FigureId::Fig5.default_grid().len(), 161);
        assert_eq!(FigureId::Fig6.default_grid().len(), 120);
    }

    #[test]
    fn example_truths_follow_the_overall_mean_frame() {
        let design = TwoSampleDesign::new(100, 300).unwrap();
        let (a, b) = two_sample_truth(&design, 0.5, 0.2);
        assert!((a - 0.35).abs() < 1e-15 && (b - 0.55).abs() < 1e-15);
    }

    #[test]
    fn fig2b_starts_on_the_upper_plateau() {
        let data = compute_figure(FigureId::Fig2b, &Overrides::default()).unwrap();
        let curve = &data.panels[0].series[0].curve;
        assert_eq!(curve.points[0].param, 0.0);
        assert_eq!(curve.points[0].coverage, 0.95);
        assert_eq!(curve.points.last().unwrap().coverage, 0.90);
        assert!(data.issues.is_empty());
    }

    #[test]
    fn fig5_delta_step_for_balanced_design() {
        let overrides = Overrides {
            grid: Some(Grid::new(3.28, 3.30, 0.01).unwrap()),
            qmc_points: Some(256),
            scrambles: Some(2),
            ..Overrides::default()
        };
        let data = compute_figure(FigureId::Fig5, &overrides).unwrap();
        let panel = data.panel("c").unwrap();
        let s = panel
            .series
            .iter()
            .find(|s| s.panel == "c/omega=0.5")
            .unwrap();
        let cov: Vec<f64> = s.curve.coverages().collect();
        assert_eq!(cov, vec![0.95, 0.90, 0.90]);
    }

    #[test]
    fn bad_points_are_reported_not_fatal() {
        let overrides = Overrides {
            grid: Some(Grid::new(1.9, 2.1, 0.1).unwrap()),
            ..Overrides::default()
        };
        let data = compute_figure(FigureId::Fig1a, &overrides).unwrap();
        assert_eq!(data.panels[0].series[0].curve.len(), 2);
        assert_eq!(data.issues.len(), 1);
        assert_eq!(data.issues[0].kind, IssueKind::Error);
        assert_eq!(data.issues[0].param_value, Some(1.9));
        assert!(render_issues(&data)
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("fig1a,a,exact,theta,1.9,error,"));
    }

    #[test]
    fn knife_edge_points_are_flagged() {
        let z = coverbound::numerics::norm_quantile(0.95);
        let overrides = Overrides {
            grid: Some(Grid::point(z).unwrap()),
            ..Overrides::default()
        };
        let data = compute_figure(FigureId::Fig2b, &overrides).unwrap();
        assert_eq!(data.issues.len(), 1);
        assert_eq!(data.issues[0].kind, IssueKind::KnifeEdge);
        assert_eq!(data.panels[0].series[0].curve.points[0].coverage, 0.95);
    }

    #[test]
    fn invalid_overrides_fail_the_job() {
        let bad_alpha = Overrides {
            alpha1: Some(0.6),
            ..Overrides::default()
        };
        assert!(compute_figure(FigureId::Fig2b, &bad_alpha).is_err());
        let bad_qmc = Overrides {
            qmc_points: Some(0),
            ..Overrides::default()
        };
        assert!(compute_figure(FigureId::Fig5, &bad_qmc).is_err());
    }
}
