//! Monte Carlo parametric bootstrap percentile intervals and simulated coverage.
//!
//! Every bootstrap replicate draws the sufficient statistic ΣXᵢ* directly from
//! its exact law at the fitted mean, which has the same distribution as
//! summing n individual draws and costs one variate instead of n.

use rayon::prelude::*;

use crate::error::{CoverError, Result};
use crate::estimators::{mle_one_sample, mle_two_sample, OneSampleConstraint, TwoSampleDesign};
use crate::nef::{FamilySpec, MeanParam};
use crate::numerics::{norm_cdf, Probability};
use crate::rng::RngState;

const DATA_STREAM: u64 = 0;
const BOOT_STREAM: u64 = 1;

/// Tail levels and bootstrap replicate count.
///
/// Quantiles follow the left-continuous inverse of the empirical CDF: with
/// replicates sorted ascending, q*_α is the value at 1-based index ⌈Bα⌉.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CIConfig {
    alpha1: f64,
    alpha2: f64,
    b: usize,
}

impl CIConfig {
    pub const DEFAULT_B: usize = 1999;

    pub fn new(alpha1: f64, alpha2: f64, b: usize) -> Result<Self> {
        for (name, a) in [("alpha1", alpha1), ("alpha2", alpha2)] {
            if !(a > 0.0 && a < 0.5) {
                return Err(CoverError::domain(
                    "CIConfig",
                    format!("{name} = {a} must lie in (0, 0.5)"),
                ));
            }
        }
        if b < 100 {
            return Err(CoverError::domain(
                "CIConfig",
                format!("B = {b} must be at least 100"),
            ));
        }
        Ok(CIConfig { alpha1, alpha2, b })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn b(&self) -> usize {
        self.b
    }
}

/// Closed interval [lower, upper].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Which two-sample parameter the interval is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Theta1,
    Theta2,
    Delta,
}

impl Target {
    pub fn label(&self) -> &'static str {
        match self {
            Target::Theta1 => "theta1",
            Target::Theta2 => "theta2",
            Target::Delta => "delta",
        }
    }
}

/// Simulated coverage with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageEstimate {
    pub estimate: Probability,
    pub replications: u64,
    pub mc_std_error: f64,
}

impl CoverageEstimate {
    pub fn from_counts(covered: u64, replications: u64) -> Self {
        let p = covered as f64 / replications as f64;
        CoverageEstimate {
            estimate: Probability::clamped(p),
            replications,
            mc_std_error: (p * (1.0 - p) / replications as f64).sqrt(),
        }
    }
}

/// The data-generating scenario for [`mc_coverage`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// Unconstrained intervals use `d = -∞`.
    OneSample {
        theta0: f64,
        n: u64,
        constraint: OneSampleConstraint,
    },
    TwoSample {
        theta10: f64,
        theta20: f64,
        design: TwoSampleDesign,
        target: Target,
        constrained: bool,
    },
}

/// 1-based rank ⌈Bα⌉ of the α-quantile among `b` sorted replicates.
pub fn quantile_rank(b: usize, alpha: f64) -> usize {
    // The tolerance keeps products such as 2000 · 0.05 from rounding up a rank.
    let k = (b as f64 * alpha - 1e-9).ceil();
    (k.max(1.0) as usize).min(b)
}

/// The α-quantile of a replicate set (any order).
pub fn empirical_quantile(values: &[f64], alpha: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[quantile_rank(sorted.len(), alpha) - 1]
}

/// [q*_{α₁}, q*_{1−α₂}] of a replicate set, reordering it in place.
pub fn percentile_interval(values: &mut [f64], cfg: &CIConfig) -> Interval {
    let b = values.len();
    let lo = quantile_rank(b, cfg.alpha1) - 1;
    let hi = quantile_rank(b, 1.0 - cfg.alpha2) - 1;
    let (left, upper, _) = values.select_nth_unstable_by(hi, f64::total_cmp);
    let upper = *upper;
    let lower = if lo == hi {
        upper
    } else {
        *left.select_nth_unstable_by(lo, f64::total_cmp).1
    };
    Interval { lower, upper }
}

fn sample_mean(sample: &[f64], op: &'static str) -> Result<f64> {
    if sample.is_empty() {
        return Err(CoverError::domain(op, "sample must be nonempty"));
    }
    Ok(sample.iter().sum::<f64>() / sample.len() as f64)
}

fn one_sample_from_sum(
    sum: f64,
    n: u64,
    family: FamilySpec,
    constraint: OneSampleConstraint,
    cfg: &CIConfig,
    rng_state: &RngState,
) -> Result<Interval> {
    let nf = n as f64;
    let theta_hat = mle_one_sample(sum / nf, constraint);
    let sampler = family.sum_sampler(theta_hat, n)?;
    let mut rng = rng_state.rng();
    let mut reps: Vec<f64> = (0..cfg.b)
        .map(|_| mle_one_sample(sampler.sample(&mut rng) / nf, constraint))
        .collect();
    Ok(percentile_interval(&mut reps, cfg))
}

/// Bootstrap percentile interval for θ under θ ≥ d.
pub fn percentile_ci_one_sample(
    sample: &[f64],
    family: FamilySpec,
    constraint: OneSampleConstraint,
    cfg: &CIConfig,
    rng_state: &RngState,
) -> Result<Interval> {
    let xbar = sample_mean(sample, "percentile_ci_one_sample")?;
    MeanParam::new(family, xbar)?;
    let n = sample.len() as u64;
    one_sample_from_sum(xbar * n as f64, n, family, constraint, cfg, rng_state)
}

fn target_value(
    t1: f64,
    t2: f64,
    design: &TwoSampleDesign,
    target: Target,
    constrained: bool,
) -> f64 {
    if constrained {
        let est = mle_two_sample(t1, t2, design);
        match target {
            Target::Theta1 => est.theta1_hat,
            Target::Theta2 => est.theta2_hat,
            Target::Delta => est.delta_hat,
        }
    } else {
        match target {
            Target::Theta1 => t1,
            Target::Theta2 => t2,
            Target::Delta => t2 - t1,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn two_sample_from_sums(
    sum1: f64,
    sum2: f64,
    family: FamilySpec,
    design: &TwoSampleDesign,
    cfg: &CIConfig,
    rng_state: &RngState,
    target: Target,
    constrained: bool,
) -> Result<Interval> {
    let (n1, n2) = (design.n1(), design.n2());
    let (nf1, nf2) = (n1 as f64, n2 as f64);
    let (xbar1, xbar2) = (sum1 / nf1, sum2 / nf2);
    let (fit1, fit2) = if constrained {
        let est = mle_two_sample(xbar1, xbar2, design);
        (est.theta1_hat, est.theta2_hat)
    } else {
        (xbar1, xbar2)
    };
    let s1 = family.sum_sampler(fit1, n1)?;
    let s2 = family.sum_sampler(fit2, n2)?;
    let mut rng = rng_state.rng();
    let mut reps: Vec<f64> = (0..cfg.b)
        .map(|_| {
            let m1 = s1.sample(&mut rng) / nf1;
            let m2 = s2.sample(&mut rng) / nf2;
            target_value(m1, m2, design, target, constrained)
        })
        .collect();
    Ok(percentile_interval(&mut reps, cfg))
}

/// Bootstrap percentile interval for θ₁, θ₂ or Δ under θ₁ ≤ θ₂.
pub fn percentile_ci_two_sample(
    sample1: &[f64],
    sample2: &[f64],
    family: FamilySpec,
    design: &TwoSampleDesign,
    cfg: &CIConfig,
    rng_state: &RngState,
    target: Target,
) -> Result<Interval> {
    let op = "percentile_ci_two_sample";
    if sample1.len() as u64 != design.n1() || sample2.len() as u64 != design.n2() {
        return Err(CoverError::domain(
            op,
            format!(
                "sample sizes ({}, {}) do not match design ({}, {})",
                sample1.len(),
                sample2.len(),
                design.n1(),
                design.n2()
            ),
        ));
    }
    let xbar1 = sample_mean(sample1, op)?;
    let xbar2 = sample_mean(sample2, op)?;
    MeanParam::new(family, xbar1)?;
    MeanParam::new(family, xbar2)?;
    two_sample_from_sums(
        xbar1 * design.n1() as f64,
        xbar2 * design.n2() as f64,
        family,
        design,
        cfg,
        rng_state,
        target,
        true,
    )
}

/// Fraction of `replications` simulated datasets whose percentile interval
/// covers the true target value.
///
/// Replicate r draws its data from stream `rng_state.derive(r).derive(0)` and
/// its bootstrap from `.derive(1)`, so the result does not depend on how
/// replicates are spread across threads.
pub fn mc_coverage(
    family: FamilySpec,
    scenario: &Scenario,
    cfg: &CIConfig,
    replications: u64,
    rng_state: &RngState,
) -> Result<CoverageEstimate> {
    if replications < 100 {
        return Err(CoverError::domain(
            "mc_coverage",
            format!("replications = {replications} must be at least 100"),
        ));
    }
    let covered = match *scenario {
        Scenario::OneSample {
            theta0,
            n,
            constraint,
        } => {
            MeanParam::new(family, theta0)?;
            if theta0 < constraint.d {
                return Err(CoverError::domain(
                    "mc_coverage",
                    format!("theta0 = {theta0} violates theta >= {}", constraint.d),
                ));
            }
            let data = family.sum_sampler(theta0, n)?;
            (0..replications)
                .into_par_iter()
                .map(|r| {
                    let stream = rng_state.derive(r);
                    let sum = data.sample(&mut stream.derive(DATA_STREAM).rng());
                    let ci = one_sample_from_sum(
                        sum,
                        n,
                        family,
                        constraint,
                        cfg,
                        &stream.derive(BOOT_STREAM),
                    )?;
                    Ok(ci.contains(theta0) as u64)
                })
                .try_reduce(|| 0, |a, b| Ok(a + b))?
        }
        Scenario::TwoSample {
            theta10,
            theta20,
            design,
            target,
            constrained,
        } => {
            MeanParam::new(family, theta10)?;
            MeanParam::new(family, theta20)?;
            if constrained && theta10 > theta20 {
                return Err(CoverError::domain(
                    "mc_coverage",
                    format!("theta10 = {theta10} exceeds theta20 = {theta20}"),
                ));
            }
            let truth = match target {
                Target::Theta1 => theta10,
                Target::Theta2 => theta20,
                Target::Delta => theta20 - theta10,
            };
            let d1 = family.sum_sampler(theta10, design.n1())?;
            let d2 = family.sum_sampler(theta20, design.n2())?;
            (0..replications)
                .into_par_iter()
                .map(|r| {
                    let stream = rng_state.derive(r);
                    let mut rng = stream.derive(DATA_STREAM).rng();
                    let sum1 = d1.sample(&mut rng);
                    let sum2 = d2.sample(&mut rng);
                    let ci = two_sample_from_sums(
                        sum1,
                        sum2,
                        family,
                        &design,
                        cfg,
                        &stream.derive(BOOT_STREAM),
                        target,
                        constrained,
                    )?;
                    Ok(ci.contains(truth) as u64)
                })
                .try_reduce(|| 0, |a, b| Ok(a + b))?
        }
    };
    Ok(CoverageEstimate::from_counts(covered, replications))
}

/// |Ĥ*(x) − Φ(x)| at each probe, where Ĥ* is the empirical CDF of
/// √n(X̄* − θ̂)/σ(θ̂) over `b` bootstrap draws at θ̂.
pub fn bootstrap_cdf_diagnostic(
    family: FamilySpec,
    theta_hat: f64,
    n: u64,
    probes: &[f64],
    b: usize,
    rng_state: &RngState,
) -> Result<Vec<(f64, f64)>> {
    let op = "bootstrap_cdf_diagnostic";
    if let Some(x) = probes.iter().find(|x| !x.is_finite()) {
        return Err(CoverError::domain(op, format!("probe {x} is not finite")));
    }
    if b == 0 {
        return Err(CoverError::domain(op, "B must be positive"));
    }
    let sigma = family.variance_at_mean(theta_hat)?.sqrt();
    if sigma == 0.0 {
        return Err(CoverError::domain(
            op,
            format!("theta_hat = {theta_hat} is degenerate"),
        ));
    }
    let sampler = family.sum_sampler(theta_hat, n)?;
    let nf = n as f64;
    let scale = nf.sqrt() / sigma;
    let mut rng = rng_state.rng();
    let mut z: Vec<f64> = (0..b)
        .map(|_| (sampler.sample(&mut rng) / nf - theta_hat) * scale)
        .collect();
    z.sort_by(f64::total_cmp);
    Ok(probes
        .iter()
        .map(|&x| {
            let below = z.partition_point(|&v| v <= x);
            (x, (below as f64 / b as f64 - norm_cdf(x)).abs())
        })
        .collect())
}
