//! Local-asymptotic coverage of the percentile intervals.
//!
//! In the one-sample problem and for the difference Δ the limiting coverage is
//! a step function of the local parameter. For θ₁ and θ₂ it is the
//! probability that a limiting bootstrap CDF value g(x, y) falls in
//! [α₁, 1 − α₂], where (x, y) is the limit of the standardized constrained
//! MLEs. That limit is a min/max transform of two independent standard
//! normals, so the coverage is integrated over (z₁, z₂) with scrambled QMC.

use rayon::prelude::*;

use crate::error::{CoverError, Result};
use crate::numerics::{bvn, norm_cdf, std_normal_quantile, Probability, QmcSpec, Sobol2};
use crate::rng::RngState;

/// Distance from a threshold within which a point counts as on the knife-edge.
pub const KNIFE_EDGE_TOL: f64 = 1e-12;

/// Default QMC budget: points per scramble and number of scrambles.
pub const DEFAULT_QMC_POINTS: u64 = 1 << 20;
pub const DEFAULT_SCRAMBLES: usize = 8;

const CHUNK: u64 = 1 << 14;

/// One-sample local frame: θ₀ = d + τ/√n with limiting standard deviation σ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrameOne {
    tau: f64,
    sigma0: f64,
}

impl LocalFrameOne {
    pub fn new(tau: f64, sigma0: f64) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(CoverError::domain(
                "LocalFrameOne",
                format!("tau = {tau} must be finite and >= 0"),
            ));
        }
        check_sigma0("LocalFrameOne", sigma0)?;
        Ok(LocalFrameOne { tau, sigma0 })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }
}

/// Two-sample local frame: Δ₀ = δ/√n around the overall mean η₀, with
/// ω = n₁/n and σ₀ the standard deviation at η₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrameTwo {
    delta: f64,
    omega: f64,
    sigma0: f64,
    eta0: f64,
}

impl LocalFrameTwo {
    pub fn new(delta: f64, omega: f64, sigma0: f64, eta0: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(CoverError::domain(
                "LocalFrameTwo",
                format!("delta = {delta} must be finite and >= 0"),
            ));
        }
        if !(omega > 0.0 && omega < 1.0) {
            return Err(CoverError::domain(
                "LocalFrameTwo",
                format!("omega = {omega} must lie in (0, 1)"),
            ));
        }
        check_sigma0("LocalFrameTwo", sigma0)?;
        Ok(LocalFrameTwo {
            delta,
            omega,
            sigma0,
            eta0,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        LocalFrameTwo::new(delta, self.omega, self.sigma0, self.eta0)
    }
}

fn check_sigma0(op: &'static str, sigma0: f64) -> Result<()> {
    if sigma0 > 0.0 && sigma0.is_finite() {
        Ok(())
    } else {
        Err(CoverError::domain(
            op,
            format!("sigma0 = {sigma0} must be positive"),
        ))
    }
}

fn check_alphas(op: &'static str, alpha1: f64, alpha2: f64) -> Result<()> {
    for (name, a) in [("alpha1", alpha1), ("alpha2", alpha2)] {
        if !(a > 0.0 && a < 0.5) {
            return Err(CoverError::domain(
                op,
                format!("{name} = {a} must lie in (0, 0.5)"),
            ));
        }
    }
    Ok(())
}

/// A point of the limit law of the standardized (θ̂₁, θ̂₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F12Point {
    pub x: f64,
    pub y: f64,
}

/// Coverage of a step-shaped limit, with a flag for the undefined threshold point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCoverage {
    pub coverage: Probability,
    pub at_boundary: bool,
}

/// A QMC coverage estimate with its scramble-replicate spread.
#[derive(Debug, Clone, PartialEq)]
pub struct QmcCoverage {
    pub coverage: Probability,
    /// Half the range of the replicate means; zero with a single replicate.
    pub error_estimate: f64,
    pub replicate_means: Vec<f64>,
}

/// Exact coverage for N(θ, 1) data with boundary 0: 1 − α₁ − α₂ when
/// √n θ₀ > Φ⁻¹(1 − α₂), otherwise 1 − α₁.
pub fn exact_normal_coverage(n: u64, theta0: f64, alpha1: f64, alpha2: f64) -> Result<Probability> {
    let op = "exact_normal_coverage";
    check_alphas(op, alpha1, alpha2)?;
    if n == 0 {
        return Err(CoverError::domain(op, "n must be positive"));
    }
    if !(theta0 >= 0.0 && theta0.is_finite()) {
        return Err(CoverError::domain(
            op,
            format!("theta0 = {theta0} must be finite and >= 0"),
        ));
    }
    let z = std_normal_quantile(1.0 - alpha2)?;
    let c = if (n as f64).sqrt() * theta0 > z {
        1.0 - (alpha1 + alpha2)
    } else {
        1.0 - alpha1
    };
    Probability::new(c)
}

fn step(local: f64, threshold: f64, alpha1: f64, alpha2: f64) -> Result<StepCoverage> {
    let at_boundary = (local - threshold).abs() <= KNIFE_EDGE_TOL;
    let c = if local > threshold && !at_boundary {
        1.0 - (alpha1 + alpha2)
    } else {
        1.0 - alpha1
    };
    Ok(StepCoverage {
        coverage: Probability::new(c)?,
        at_boundary,
    })
}

/// Limiting one-sample coverage: 1 − α₁ − α₂ above τ* = Φ⁻¹(1 − α₂)σ₀,
/// 1 − α₁ below, and the lower branch (flagged) within [`KNIFE_EDGE_TOL`] of τ*.
pub fn asym_coverage_one_sample(
    frame: &LocalFrameOne,
    alpha1: f64,
    alpha2: f64,
) -> Result<StepCoverage> {
    check_alphas("asym_coverage_one_sample", alpha1, alpha2)?;
    let threshold = std_normal_quantile(1.0 - alpha2)? * frame.sigma0;
    step(frame.tau, threshold, alpha1, alpha2)
}

/// δ* = Φ⁻¹(1 − α₂)σ₀/√(ω(1 − ω)).
pub fn delta_threshold(omega: f64, sigma0: f64, alpha2: f64) -> Result<f64> {
    Ok(std_normal_quantile(1.0 - alpha2)? * sigma0 / (omega * (1.0 - omega)).sqrt())
}

/// Limiting coverage for Δ: a step at [`delta_threshold`].
pub fn asym_coverage_delta(
    frame: &LocalFrameTwo,
    alpha1: f64,
    alpha2: f64,
) -> Result<StepCoverage> {
    check_alphas("asym_coverage_delta", alpha1, alpha2)?;
    let threshold = delta_threshold(frame.omega, frame.sigma0, alpha2)?;
    step(frame.delta, threshold, alpha1, alpha2)
}

/// Frame quantities reused at every integration point.
#[derive(Debug, Clone, Copy)]
struct Consts {
    omega: f64,
    sqrt_w: f64,
    sqrt_1mw: f64,
    shift1: f64,
    shift2: f64,
}

impl Consts {
    fn new(frame: &LocalFrameTwo) -> Self {
        let w = frame.omega;
        let r = frame.delta / frame.sigma0;
        Consts {
            omega: w,
            sqrt_w: w.sqrt(),
            sqrt_1mw: (1.0 - w).sqrt(),
            shift1: (1.0 - w) * r,
            shift2: w * r,
        }
    }

    #[inline]
    fn transform(&self, z1: f64, z2: f64) -> F12Point {
        let w = self.sqrt_w * z1 + self.sqrt_1mw * z2;
        F12Point {
            x: (z1 / self.sqrt_w).min(w + self.shift1),
            y: (z2 / self.sqrt_1mw).max(w - self.shift2),
        }
    }

    #[inline]
    fn g1(&self, p: F12Point) -> f64 {
        let c11 = self.sqrt_w * p.x;
        let c12 = self.omega * p.x + (1.0 - self.omega) * p.y + self.shift1;
        (norm_cdf(-c11) + norm_cdf(-c12) - bvn(-c11, -c12, self.sqrt_w)).clamp(0.0, 1.0)
    }

    #[inline]
    fn g2(&self, p: F12Point) -> f64 {
        let c21 = self.sqrt_1mw * p.y;
        let c22 = self.omega * p.x + (1.0 - self.omega) * p.y - self.shift2;
        bvn(-c21, -c22, self.sqrt_1mw)
    }
}

/// (x, y) = (min(z₁/√ω, w + (1 − ω)δ/σ₀), max(z₂/√(1 − ω), w − ωδ/σ₀))
/// with w = √ω z₁ + √(1 − ω) z₂.
pub fn transform_f12(z1: f64, z2: f64, frame: &LocalFrameTwo) -> F12Point {
    Consts::new(frame).transform(z1, z2)
}

/// Limiting bootstrap P(θ̂₁* ≤ θ₁₀) given the standardized estimates (x, y).
pub fn g1(p: F12Point, frame: &LocalFrameTwo) -> Probability {
    Probability::clamped(Consts::new(frame).g1(p))
}

/// Limiting bootstrap P(θ̂₂* ≤ θ₂₀) given the standardized estimates (x, y).
pub fn g2(p: F12Point, frame: &LocalFrameTwo) -> Probability {
    Probability::clamped(Consts::new(frame).g2(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Which {
    Theta1,
    Theta2,
}

fn qmc_coverage(
    frame: &LocalFrameTwo,
    alpha1: f64,
    alpha2: f64,
    qmc: &QmcSpec,
    scrambles: usize,
    which: Which,
) -> Result<QmcCoverage> {
    check_alphas("asym_coverage", alpha1, alpha2)?;
    qmc.validate()?;
    let replicates = if qmc.scramble { scrambles.max(1) } else { 1 };
    let master = RngState::new(qmc.seed);
    let gens: Vec<Sobol2> = (0..replicates)
        .map(|r| {
            if qmc.scramble {
                Sobol2::scrambled(master.derive(r as u64).key())
            } else {
                Sobol2::unscrambled()
            }
        })
        .collect();
    let consts = Consts::new(frame);
    let (lo, hi) = (alpha1, 1.0 - alpha2);
    let n = qmc.point_count;
    let chunks = n.div_ceil(CHUNK);
    let tasks: Vec<(usize, u64)> = (0..replicates)
        .flat_map(|r| (0..chunks).map(move |c| (r, c)))
        .collect();
    let counts: Vec<(usize, u64)> = tasks
        .par_iter()
        .map(|&(r, c)| {
            let start = 1 + c * CHUNK;
            let end = (start + CHUNK).min(n + 1);
            let hits = crate::numerics::normal_pairs_block(&gens[r], start, end)
                .filter(|&(z1, z2)| {
                    let p = consts.transform(z1, z2);
                    let g = match which {
                        Which::Theta1 => consts.g1(p),
                        Which::Theta2 => consts.g2(p),
                    };
                    lo <= g && g <= hi
                })
                .count() as u64;
            (r, hits)
        })
        .collect();
    let mut per_rep = vec![0u64; replicates];
    for (r, hits) in counts {
        per_rep[r] += hits;
    }
    let means: Vec<f64> = per_rep.iter().map(|&h| h as f64 / n as f64).collect();
    let mean = means.iter().sum::<f64>() / replicates as f64;
    let (min, max) = means
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &m| {
            (a.min(m), b.max(m))
        });
    Ok(QmcCoverage {
        coverage: Probability::clamped(mean),
        error_estimate: 0.5 * (max - min),
        replicate_means: means,
    })
}

/// Limiting coverage for θ₁: E[I{α₁ ≤ g₁(x, y) ≤ 1 − α₂}] over the F₁₂ law.
///
/// Each of `scrambles` independently scrambled Sobol streams contributes
/// `qmc.point_count` points; an unscrambled spec uses a single stream.
pub fn asym_coverage_theta1(
    frame: &LocalFrameTwo,
    alpha1: f64,
    alpha2: f64,
    qmc: &QmcSpec,
    scrambles: usize,
) -> Result<QmcCoverage> {
    qmc_coverage(frame, alpha1, alpha2, qmc, scrambles, Which::Theta1)
}

/// Limiting coverage for θ₂: E[I{α₁ ≤ g₂(x, y) ≤ 1 − α₂}] over the F₁₂ law.
pub fn asym_coverage_theta2(
    frame: &LocalFrameTwo,
    alpha1: f64,
    alpha2: f64,
    qmc: &QmcSpec,
    scrambles: usize,
) -> Result<QmcCoverage> {
    qmc_coverage(frame, alpha1, alpha2, qmc, scrambles, Which::Theta2)
}

#[cfg(test)]
mod tests;
