//! Exact finite-sample coverage of bootstrap percentile intervals for
//! discrete families, by enumerating the sufficient statistic.
//!
//! The interval computed from an observed sufficient statistic depends only on
//! that statistic, not on the true parameter. Each engine therefore tabulates
//! the interval once per reachable statistic value (or per distinct fitted
//! pair in the two-sample case) and then evaluates any number of true
//! parameters by summing outer probabilities against the table.

mod two_sample;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bootstrap_mc::{Interval, Target};
use crate::curve::{CoverageCurve, CurvePoint, Method};
use crate::error::{CoverError, Result};
use crate::estimators::{OneSampleConstraint, TwoSampleDesign};
use crate::nef::{binomial_pq, binomial_table, poisson_window, FamilySpec, MeanParam, SumLaw};
use crate::numerics::{CompensatedSum, Probability};

pub use two_sample::TwoSampleEngine;

/// Tolerance on cumulative-probability comparisons.
pub const CDF_TOL: f64 = 1e-14;

/// Tail levels, Poisson truncation and whether the constraint is imposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub tail_eps: f64,
    pub use_constraint: bool,
}

impl ExactConfig {
    pub const DEFAULT_TAIL_EPS: f64 = 1e-12;

    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        let cfg = ExactConfig {
            alpha1,
            alpha2,
            tail_eps: Self::DEFAULT_TAIL_EPS,
            use_constraint: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tail_eps(mut self, tail_eps: f64) -> Result<Self> {
        self.tail_eps = tail_eps;
        self.validate()?;
        Ok(self)
    }

    pub fn unconstrained(mut self) -> Self {
        self.use_constraint = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(a > 0.0 && a < 0.5) {
                return Err(CoverError::domain(
                    "ExactConfig",
                    format!("{name} = {a} must lie in (0, 0.5)"),
                ));
            }
        }
        if !(self.tail_eps > 0.0 && self.tail_eps <= 1e-6) {
            return Err(CoverError::domain(
                "ExactConfig",
                format!("tail_eps = {} must lie in (0, 1e-6]", self.tail_eps),
            ));
        }
        Ok(())
    }

    fn method(&self) -> Method {
        if self.use_constraint {
            Method::Exact
        } else {
            Method::ExactUnconstrained
        }
    }
}

/// A finite law on strictly increasing values.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueDist {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl ValueDist {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let op = "ValueDist";
        if values.is_empty() || values.len() != probs.len() {
            return Err(CoverError::domain(
                op,
                "values and probs must be nonempty and of equal length",
            ));
        }
        if values
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(CoverError::domain(op, "values must be strictly increasing"));
        }
        if probs.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(CoverError::domain(
                op,
                "probabilities must be finite and nonnegative",
            ));
        }
        let total = probs.iter().copied().sum::<CompensatedSum>().value();
        if !(1.0 - 2e-6..=1.0 + 1e-12).contains(&total) {
            return Err(CoverError::domain(
                op,
                format!("probabilities sum to {total}"),
            ));
        }
        Ok(ValueDist { values, probs })
    }

    pub fn point_mass(value: f64) -> Self {
        ValueDist {
            values: vec![value],
            probs: vec![1.0],
        }
    }

    /// Builds a law from atoms with nondecreasing values, merging equal values.
    pub fn from_sorted_atoms<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Result<Self> {
        let mut values: Vec<f64> = Vec::new();
        let mut probs: Vec<f64> = Vec::new();
        for (v, p) in atoms {
            match values.last() {
                Some(&last) if last == v => *probs.last_mut().expect("nonempty") += p,
                _ => {
                    values.push(v);
                    probs.push(p);
                }
            }
        }
        ValueDist::new(values, probs)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Index of the first atom whose cumulative probability reaches `alpha`
/// (to within [`CDF_TOL`]); the last atom if none does.
fn first_reaching(probs: &[f64], alpha: f64) -> usize {
    let mut acc = CompensatedSum::new();
    for (i, &p) in probs.iter().enumerate() {
        acc.add(p);
        if acc.value() >= alpha - CDF_TOL {
            return i;
        }
    }
    probs.len() - 1
}

/// inf{x : G(x) ≥ α} for the law `dist`.
pub fn exact_bootstrap_quantile(dist: &ValueDist, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CoverError::domain(
            "exact_bootstrap_quantile",
            format!("alpha = {alpha} must lie in (0, 1)"),
        ));
    }
    Ok(dist.values[first_reaching(&dist.probs, alpha)])
}

/// A lattice pmf: P(S = offset + i) = pmf[i].
#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub offset: i64,
    pub pmf: Vec<f64>,
}

impl Row {
    fn from_law(law: SumLaw) -> Row {
        match law {
            SumLaw::Lattice { offset, pmf } => Row { offset, pmf },
            SumLaw::Normal { .. } => unreachable!("lattice law expected for a discrete family"),
        }
    }

    pub fn end(&self) -> i64 {
        self.offset + self.pmf.len() as i64 - 1
    }
}

/// A fitted mean, kept as an exact ratio of integers where possible so that
/// the bootstrap law is built from correctly rounded probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Fit {
    Ratio { num: u64, den: u64 },
    Value(f64),
}

impl Fit {
    pub fn row(self, family: FamilySpec, n: u64, tail_eps: f64) -> Row {
        let law = match (family, self) {
            (FamilySpec::Binomial { m }, Fit::Ratio { num, den }) => {
                let total = den * m as u64;
                let p = num as f64 / total as f64;
                let q = (total - num) as f64 / total as f64;
                binomial_table(n * m as u64, p, q)
            }
            (FamilySpec::Binomial { m }, Fit::Value(v)) => {
                let (p, q) = binomial_pq(v, m);
                binomial_table(n * m as u64, p, q)
            }
            (FamilySpec::Poisson, Fit::Ratio { num, den }) => {
                poisson_window((n * num) as f64 / den as f64, tail_eps)
            }
            (FamilySpec::Poisson, Fit::Value(v)) => poisson_window(n as f64 * v, tail_eps),
            (FamilySpec::NormalKnownVar { .. }, _) => {
                unreachable!("continuous family rejected earlier")
            }
        };
        Row::from_law(law)
    }

    /// Smallest and largest support points of [`Fit::row`], without building it
    /// for the binomial.
    pub fn extent(self, family: FamilySpec, n: u64, tail_eps: f64) -> (i64, i64) {
        match family {
            FamilySpec::Binomial { m } => (0, (n * m as u64) as i64),
            _ => {
                let row = self.row(family, n, tail_eps);
                (row.offset, row.end())
            }
        }
    }
}

pub(crate) fn require_discrete(family: FamilySpec, op: &'static str) -> Result<()> {
    family.validate()?;
    if family.is_discrete() {
        Ok(())
    } else {
        Err(CoverError::UnsupportedFamily {
            op,
            family: family.to_string(),
        })
    }
}

pub(crate) fn truth_row(family: FamilySpec, theta: f64, n: u64, tail_eps: f64) -> Result<Row> {
    Ok(Row::from_law(
        family.sum_distribution(theta, n, tail_eps)?.law,
    ))
}

/// Sum of the terms in ascending order, so the result depends only on the
/// multiset of terms.
pub(crate) fn stable_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum::<CompensatedSum>().value()
}

/// Interval table for the one-sample problem over a range of statistic values.
#[derive(Debug, Clone)]
pub struct OneSampleEngine {
    family: FamilySpec,
    n: u64,
    d: f64,
    cfg: ExactConfig,
    offset: i64,
    intervals: Vec<Interval>,
}

impl OneSampleEngine {
    /// Tabulates intervals for every statistic value reachable under any of `truths`.
    pub fn build(
        family: FamilySpec,
        constraint: OneSampleConstraint,
        n: u64,
        cfg: &ExactConfig,
        truths: &[f64],
    ) -> Result<Self> {
        let op = "exact_coverage_one_sample";
        require_discrete(family, op)?;
        cfg.validate()?;
        if n == 0 {
            return Err(CoverError::domain(op, "n must be positive"));
        }
        let d = if cfg.use_constraint {
            MeanParam::new(family, constraint.d)?;
            constraint.d
        } else {
            f64::NEG_INFINITY
        };
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for &theta in truths {
            let row = truth_row(family, theta, n, cfg.tail_eps)?;
            lo = lo.min(row.offset);
            hi = hi.max(row.end());
        }
        if truths.is_empty() {
            lo = 0;
            hi = -1;
        }
        let mut engine = OneSampleEngine {
            family,
            n,
            d,
            cfg: *cfg,
            offset: lo,
            intervals: Vec::new(),
        };
        engine.intervals = (lo..=hi)
            .into_par_iter()
            .map(|s| engine.compute_interval(s))
            .collect();
        Ok(engine)
    }

    fn fit(&self, s: i64) -> Fit {
        if s as f64 / self.n as f64 >= self.d {
            Fit::Ratio {
                num: s as u64,
                den: self.n,
            }
        } else {
            Fit::Value(self.d)
        }
    }

    fn compute_interval(&self, s: i64) -> Interval {
        let row = self.fit(s).row(self.family, self.n, self.cfg.tail_eps);
        let nf = self.n as f64;
        let at = |i: usize| ((row.offset + i as i64) as f64 / nf).max(self.d);
        Interval {
            lower: at(first_reaching(&row.pmf, self.cfg.alpha1)),
            upper: at(first_reaching(&row.pmf, 1.0 - self.cfg.alpha2)),
        }
    }

    /// The percentile interval produced when the observed statistic is `s`.
    pub fn interval(&self, s: i64) -> Option<Interval> {
        let i = s - self.offset;
        (i >= 0)
            .then(|| self.intervals.get(i as usize).copied())
            .flatten()
    }

    /// Exact coverage at `theta0`, which must have been among the build truths.
    pub fn coverage(&self, theta0: f64) -> Result<f64> {
        let row = truth_row(self.family, theta0, self.n, self.cfg.tail_eps)?;
        let mut acc = CompensatedSum::new();
        for (i, &p) in row.pmf.iter().enumerate() {
            let s = row.offset + i as i64;
            let ci = self.interval(s).ok_or_else(|| {
                CoverError::domain(
                    "exact_coverage_one_sample",
                    format!("statistic {s} was not tabulated"),
                )
            })?;
            if ci.contains(theta0) {
                acc.add(p);
            }
        }
        Ok(acc.value())
    }
}

fn check_one_sample_truth(
    family: FamilySpec,
    d: f64,
    theta0: f64,
    cfg: &ExactConfig,
) -> Result<()> {
    MeanParam::new(family, theta0)?;
    if cfg.use_constraint && theta0 < d {
        return Err(CoverError::domain(
            "exact_coverage_one_sample",
            format!("theta0 = {theta0} violates theta >= {d}"),
        ));
    }
    Ok(())
}

fn check_two_sample_truth(
    family: FamilySpec,
    theta10: f64,
    theta20: f64,
    cfg: &ExactConfig,
) -> Result<()> {
    MeanParam::new(family, theta10)?;
    MeanParam::new(family, theta20)?;
    if cfg.use_constraint && theta10 > theta20 {
        return Err(CoverError::domain(
            "exact_coverage_two_sample",
            format!("theta10 = {theta10} exceeds theta20 = {theta20}"),
        ));
    }
    Ok(())
}

/// Exact coverage of the one-sample percentile interval at θ₀.
pub fn exact_coverage_one_sample(
    family: FamilySpec,
    constraint: OneSampleConstraint,
    n: u64,
    theta0: f64,
    cfg: &ExactConfig,
) -> Result<Probability> {
    require_discrete(family, "exact_coverage_one_sample")?;
    check_one_sample_truth(family, constraint.d, theta0, cfg)?;
    let engine = OneSampleEngine::build(family, constraint, n, cfg, &[theta0])?;
    Ok(Probability::clamped(engine.coverage(theta0)?))
}

/// Exact coverage of the two-sample percentile interval for `target` at (θ₁₀, θ₂₀).
pub fn exact_coverage_two_sample(
    family: FamilySpec,
    design: &TwoSampleDesign,
    theta10: f64,
    theta20: f64,
    cfg: &ExactConfig,
    target: Target,
) -> Result<Probability> {
    require_discrete(family, "exact_coverage_two_sample")?;
    check_two_sample_truth(family, theta10, theta20, cfg)?;
    let engine = TwoSampleEngine::build(family, design, cfg, target, &[(theta10, theta20)])?;
    Ok(Probability::clamped(engine.coverage(theta10, theta20)?))
}

/// Which exact problem a curve sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactScenario {
    OneSample {
        family: FamilySpec,
        constraint: OneSampleConstraint,
        n: u64,
    },
    TwoSample {
        family: FamilySpec,
        design: TwoSampleDesign,
        target: Target,
    },
}

/// True parameter value(s) at a grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truth {
    One(f64),
    Two { theta10: f64, theta20: f64 },
}

/// A grid coordinate and the true parameters it stands for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub param: f64,
    pub truth: Truth,
}

/// Exact coverage at every grid point, in grid order. Points that fail
/// validation are left out of the curve and reported with their grid index.
pub fn coverage_curve_lenient(
    scenario: &ExactScenario,
    grid: &[GridPoint],
    cfg: &ExactConfig,
) -> Result<(CoverageCurve, Vec<CoverError>)> {
    cfg.validate()?;
    let family = match scenario {
        ExactScenario::OneSample { family, .. } | ExactScenario::TwoSample { family, .. } => {
            *family
        }
    };
    require_discrete(family, "coverage_curve")?;

    let mut errors = Vec::new();
    let mut valid: Vec<(usize, GridPoint)> = Vec::new();
    for (index, point) in grid.iter().enumerate() {
        let checked = match (scenario, point.truth) {
            (ExactScenario::OneSample { constraint, .. }, Truth::One(theta0)) => {
                check_one_sample_truth(family, constraint.d, theta0, cfg)
            }
            (ExactScenario::TwoSample { .. }, Truth::Two { theta10, theta20 }) => {
                check_two_sample_truth(family, theta10, theta20, cfg)
            }
            _ => Err(CoverError::domain(
                "coverage_curve",
                "grid point does not match the scenario",
            )),
        };
        match checked {
            Ok(()) => valid.push((index, *point)),
            Err(e) => errors.push(CoverError::GridPoint {
                index,
                source: Box::new(e),
            }),
        }
    }

    let values: Vec<Result<f64>> = match *scenario {
        ExactScenario::OneSample { constraint, n, .. } => {
            let truths: Vec<f64> = valid
                .iter()
                .map(|(_, p)| match p.truth {
                    Truth::One(t) => t,
                    Truth::Two { .. } => unreachable!(),
                })
                .collect();
            let engine = OneSampleEngine::build(family, constraint, n, cfg, &truths)?;
            truths.par_iter().map(|&t| engine.coverage(t)).collect()
        }
        ExactScenario::TwoSample { design, target, .. } => {
            let truths: Vec<(f64, f64)> = valid
                .iter()
                .map(|(_, p)| match p.truth {
                    Truth::Two { theta10, theta20 } => (theta10, theta20),
                    Truth::One(_) => unreachable!(),
                })
                .collect();
            let engine = TwoSampleEngine::build(family, &design, cfg, target, &truths)?;
            truths
                .par_iter()
                .map(|&(a, b)| engine.coverage(a, b))
                .collect()
        }
    };

    let mut curve = CoverageCurve::new(cfg.method());
    let mut failures: BTreeMap<usize, CoverError> = errors
        .into_iter()
        .map(|e| match &e {
            CoverError::GridPoint { index, .. } => (*index, e),
            _ => unreachable!(),
        })
        .collect();
    for ((index, point), value) in valid.into_iter().zip(values) {
        match value {
            Ok(c) => curve
                .points
                .push(CurvePoint::exact(point.param, c.clamp(0.0, 1.0))),
            Err(e) => {
                failures.insert(
                    index,
                    CoverError::GridPoint {
                        index,
                        source: Box::new(e),
                    },
                );
            }
        }
    }
    Ok((curve, failures.into_values().collect()))
}

/// Exact coverage at every grid point, in grid order; fails on the first bad point.
pub fn coverage_curve(
    scenario: &ExactScenario,
    grid: &[GridPoint],
    cfg: &ExactConfig,
) -> Result<CoverageCurve> {
    let (curve, mut errors) = coverage_curve_lenient(scenario, grid, cfg)?;
    if errors.is_empty() {
        Ok(curve)
    } else {
        Err(errors.swap_remove(0))
    }
}
