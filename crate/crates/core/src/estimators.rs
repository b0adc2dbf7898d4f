//! Constrained maximum likelihood estimators.
//!
//! In a natural exponential family the constrained MLE is the least-squares
//! projection of the sample mean(s) onto the constraint set, so both
//! estimators are closed form: a clamp for the boundary problem and pooling
//! of adjacent violators for the two-sample ordering.

use crate::error::{CoverError, Result};

/// Parameter space {θ : θ ≥ d}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneSampleConstraint {
    pub d: f64,
}

impl OneSampleConstraint {
    pub fn new(d: f64) -> Self {
        OneSampleConstraint { d }
    }
}

/// Sample sizes of a two-sample design; ω = n₁/(n₁ + n₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSampleDesign {
    n1: u64,
    n2: u64,
    omega: f64,
}

impl TwoSampleDesign {
    pub fn new(n1: u64, n2: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(CoverError::domain(
                "TwoSampleDesign",
                format!("sample sizes must be positive, got ({n1}, {n2})"),
            ));
        }
        Ok(TwoSampleDesign {
            n1,
            n2,
            omega: n1 as f64 / (n1 + n2) as f64,
        })
    }

    pub fn n1(&self) -> u64 {
        self.n1
    }

    pub fn n2(&self) -> u64 {
        self.n2
    }

    pub fn total(&self) -> u64 {
        self.n1 + self.n2
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// Constrained estimates of (θ₁, θ₂, Δ = θ₂ − θ₁) under θ₁ ≤ θ₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSampleEstimate {
    pub theta1_hat: f64,
    pub theta2_hat: f64,
    pub delta_hat: f64,
}

impl TwoSampleEstimate {
    /// True when the ordering constraint is slack (estimates equal the sample means).
    pub fn is_slack(&self, xbar1: f64, xbar2: f64) -> bool {
        self.theta1_hat == xbar1 && self.theta2_hat == xbar2
    }

    pub fn is_pooled(&self) -> bool {
        self.theta1_hat == self.theta2_hat
    }
}

/// θ̂ = max(x̄, d).
#[inline]
pub fn mle_one_sample(xbar: f64, constraint: OneSampleConstraint) -> f64 {
    xbar.max(constraint.d)
}

/// θ̂₁ = min(x̄₁, pooled), θ̂₂ = max(x̄₂, pooled), Δ̂ = (x̄₂ − x̄₁)⁺ with
/// pooled = ω x̄₁ + (1 − ω) x̄₂.
pub fn mle_two_sample(xbar1: f64, xbar2: f64, design: &TwoSampleDesign) -> TwoSampleEstimate {
    if xbar1 <= xbar2 {
        // pooled lies between the means, so both min and max return the means.
        return TwoSampleEstimate {
            theta1_hat: xbar1,
            theta2_hat: xbar2,
            delta_hat: xbar2 - xbar1,
        };
    }
    let w = design.omega();
    let pooled = (w * xbar1 + (1.0 - w) * xbar2).clamp(xbar2, xbar1);
    TwoSampleEstimate {
        theta1_hat: pooled,
        theta2_hat: pooled,
        delta_hat: 0.0,
    }
}

/// Weighted least-squares objective n₁(x̄₁ − θ₁)² + n₂(x̄₂ − θ₂)², scaled by 1/n.
fn projection_objective(xbar1: f64, xbar2: f64, omega: f64, t1: f64, t2: f64) -> f64 {
    omega * (xbar1 - t1).powi(2) + (1.0 - omega) * (xbar2 - t2).powi(2)
}

/// Brute-force check that `candidate` minimizes the weighted least-squares
/// objective over the ordered cone θ₁ ≤ θ₂.
///
/// Searches a lattice shared by both axes (so the diagonal is represented),
/// zooming in four times around the best feasible point. A test oracle; the
/// production path is [`mle_two_sample`].
pub fn projection_check(
    xbar1: f64,
    xbar2: f64,
    design: &TwoSampleDesign,
    candidate: &TwoSampleEstimate,
) -> bool {
    const HALF_WIDTH: i64 = 100;
    let omega = design.omega();
    if candidate.theta1_hat > candidate.theta2_hat {
        return false;
    }

    let mut center = (0.5 * (xbar1 + xbar2), 0.5 * (xbar1 + xbar2));
    let span = (xbar1 - xbar2).abs().max(1.0);
    let mut step = span / 50.0;
    let mut best = f64::INFINITY;
    for _ in 0..5 {
        let mut best_pt = center;
        for i in -HALF_WIDTH..=HALF_WIDTH {
            let t1 = center.0 + i as f64 * step;
            for j in -HALF_WIDTH..=HALF_WIDTH {
                let t2 = center.1 + j as f64 * step;
                if t1 > t2 {
                    continue;
                }
                let obj = projection_objective(xbar1, xbar2, omega, t1, t2);
                if obj < best {
                    best = obj;
                    best_pt = (t1, t2);
                }
            }
        }
        // Re-centre on a common coordinate so the diagonal stays on the lattice.
        center = best_pt;
        step /= 20.0;
    }
    let cand = projection_objective(
        xbar1,
        xbar2,
        omega,
        candidate.theta1_hat,
        candidate.theta2_hat,
    );
    cand <= best + 1e-9
}
