//! Natural exponential families in the mean parameterization.
//!
//! A member has density a(x) exp{ψx − b(ψ)} with mean θ = b′(ψ) and variance
//! b″(ψ). Three members are supported: the normal with known variance, the
//! Poisson, and the binomial with a known number of trials `m` (whose mean is
//! θ = m·p, so θ ranges over [0, m]).

mod pmf;

use std::fmt;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal, Poisson};

use crate::error::{CoverError, Result};
use crate::numerics::CompensatedSum;

pub(crate) use pmf::{dbinom, dpois};

/// Which family member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    NormalKnownVar { variance: f64 },
    Poisson,
    Binomial { m: u32 },
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::NormalKnownVar { variance } => write!(f, "normal(var={variance})"),
            FamilySpec::Poisson => write!(f, "poisson"),
            FamilySpec::Binomial { m } => write!(f, "binomial(m={m})"),
        }
    }
}

/// A mean parameter checked against its family's closed domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanParam {
    theta: f64,
    family: FamilySpec,
}

impl MeanParam {
    pub fn new(family: FamilySpec, theta: f64) -> Result<Self> {
        family.validate()?;
        family.check_closed("MeanParam", theta)?;
        Ok(MeanParam { theta, family })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn family(&self) -> FamilySpec {
        self.family
    }

    /// True at an admitted endpoint where the law is a point mass.
    pub fn is_degenerate(&self) -> bool {
        self.family.is_endpoint(self.theta)
    }
}

impl FamilySpec {
    pub fn normal(variance: f64) -> Result<Self> {
        let f = FamilySpec::NormalKnownVar { variance };
        f.validate()?;
        Ok(f)
    }

    pub fn binomial(m: u32) -> Result<Self> {
        let f = FamilySpec::Binomial { m };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilySpec::NormalKnownVar { variance }
                if !(variance > 0.0 && variance.is_finite()) =>
            {
                Err(CoverError::domain(
                    "FamilySpec",
                    format!("variance {variance} must be positive"),
                ))
            }
            FamilySpec::Binomial { m: 0 } => Err(CoverError::domain(
                "FamilySpec",
                "binomial m must be at least 1",
            )),
            _ => Ok(()),
        }
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self, FamilySpec::NormalKnownVar { .. })
    }

    /// Closed mean domain as (lower, upper).
    pub fn mean_domain(&self) -> (f64, f64) {
        match *self {
            FamilySpec::NormalKnownVar { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            FamilySpec::Poisson => (0.0, f64::INFINITY),
            FamilySpec::Binomial { m } => (0.0, m as f64),
        }
    }

    fn is_endpoint(&self, theta: f64) -> bool {
        match *self {
            FamilySpec::NormalKnownVar { .. } => false,
            FamilySpec::Poisson => theta == 0.0,
            FamilySpec::Binomial { m } => theta == 0.0 || theta == m as f64,
        }
    }

    fn check_closed(&self, op: &'static str, theta: f64) -> Result<()> {
        let (lo, hi) = self.mean_domain();
        if theta.is_nan() || !theta.is_finite() || theta < lo || theta > hi {
            return Err(CoverError::domain(
                op,
                format!("theta = {theta} is outside the mean domain of {self}"),
            ));
        }
        Ok(())
    }

    fn check_interior(&self, op: &'static str, theta: f64) -> Result<()> {
        self.check_closed(op, theta)?;
        if self.is_endpoint(theta) {
            return Err(CoverError::domain(
                op,
                format!("theta = {theta} is a degenerate endpoint of {self}"),
            ));
        }
        Ok(())
    }

    /// ψ = b′⁻¹(θ).
    pub fn natural_param(&self, theta: f64) -> Result<f64> {
        self.check_interior("natural_param", theta)?;
        Ok(match *self {
            FamilySpec::NormalKnownVar { variance } => theta / variance,
            FamilySpec::Poisson => theta.ln(),
            FamilySpec::Binomial { m } => {
                let m = m as f64;
                (theta / (m - theta)).ln()
            }
        })
    }

    /// θ = b′(ψ).
    pub fn mean_from_natural(&self, psi: f64) -> f64 {
        match *self {
            FamilySpec::NormalKnownVar { variance } => variance * psi,
            FamilySpec::Poisson => psi.exp(),
            FamilySpec::Binomial { m } => m as f64 / (1.0 + (-psi).exp()),
        }
    }

    /// b″(b′⁻¹(θ)); zero at the degenerate endpoints.
    pub fn variance_at_mean(&self, theta: f64) -> Result<f64> {
        self.check_closed("variance_at_mean", theta)?;
        Ok(match *self {
            FamilySpec::NormalKnownVar { variance } => variance,
            FamilySpec::Poisson => theta,
            FamilySpec::Binomial { m } => {
                let m = m as f64;
                theta * (m - theta) / m
            }
        })
    }

    /// n i.i.d. observations at mean θ.
    pub fn sample<R: Rng + ?Sized>(&self, theta: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        self.check_closed("sample", theta)?;
        if n == 0 {
            return Err(CoverError::domain("sample", "n must be positive"));
        }
        Ok(match *self {
            FamilySpec::NormalKnownVar { variance } => {
                let law = Normal::new(theta, variance.sqrt()).expect("validated variance");
                (0..n).map(|_| law.sample(rng)).collect()
            }
            FamilySpec::Poisson => {
                if theta == 0.0 {
                    vec![0.0; n]
                } else {
                    let law = Poisson::new(theta)
                        .map_err(|e| CoverError::domain("sample", e.to_string()))?;
                    (0..n).map(|_| law.sample(rng)).collect()
                }
            }
            FamilySpec::Binomial { m } => {
                let law = binomial_law(m as u64, theta / m as f64)?;
                (0..n).map(|_| law.sample(rng) as f64).collect()
            }
        })
    }

    /// One draw of the sufficient statistic ΣXᵢ for a sample of size n at mean θ.
    pub fn sample_sum<R: Rng + ?Sized>(&self, theta: f64, n: u64, rng: &mut R) -> Result<f64> {
        Ok(self.sum_sampler(theta, n)?.sample(rng))
    }

    /// Sampler for ΣXᵢ at a fixed (θ, n), for repeated draws.
    pub fn sum_sampler(&self, theta: f64, n: u64) -> Result<SumSampler> {
        self.check_closed("sum_sampler", theta)?;
        if n == 0 {
            return Err(CoverError::domain("sum_sampler", "n must be positive"));
        }
        let nf = n as f64;
        Ok(match *self {
            FamilySpec::NormalKnownVar { variance } => SumSampler::Normal(
                Normal::new(nf * theta, (nf * variance).sqrt()).expect("validated variance"),
            ),
            FamilySpec::Poisson if theta == 0.0 => SumSampler::Constant(0.0),
            FamilySpec::Poisson => SumSampler::Poisson(
                Poisson::new(nf * theta)
                    .map_err(|e| CoverError::domain("sum_sampler", e.to_string()))?,
            ),
            FamilySpec::Binomial { m } => {
                let trials = n * m as u64;
                let (p, q) = binomial_pq(theta, m);
                if p == 0.0 {
                    SumSampler::Constant(0.0)
                } else if q == 0.0 {
                    SumSampler::Constant(trials as f64)
                } else {
                    SumSampler::Binomial(binomial_law(trials, p)?)
                }
            }
        })
    }

    /// Exact law of ΣXᵢ for a sample of size n at mean θ.
    pub fn sum_distribution(&self, theta: f64, n: u64, tail_eps: f64) -> Result<SumDistribution> {
        self.check_closed("sum_distribution", theta)?;
        if n == 0 {
            return Err(CoverError::domain("sum_distribution", "n must be positive"));
        }
        if !(tail_eps > 0.0 && tail_eps <= 1e-6) {
            return Err(CoverError::domain(
                "sum_distribution",
                format!("tail_eps = {tail_eps} must lie in (0, 1e-6]"),
            ));
        }
        let law = match *self {
            FamilySpec::NormalKnownVar { variance } => SumLaw::Normal {
                mean: n as f64 * theta,
                variance: n as f64 * variance,
            },
            FamilySpec::Poisson => poisson_window(n as f64 * theta, tail_eps),
            FamilySpec::Binomial { m } => {
                let trials = n * m as u64;
                let (p, q) = binomial_pq(theta, m);
                binomial_table(trials, p, q)
            }
        };
        Ok(SumDistribution {
            family: *self,
            n,
            law,
        })
    }
}

/// (p, q) for a binomial mean θ with m trials, with q computed without cancellation where possible.
pub(crate) fn binomial_pq(theta: f64, m: u32) -> (f64, f64) {
    let m = m as f64;
    (
        (theta / m).clamp(0.0, 1.0),
        ((m - theta) / m).clamp(0.0, 1.0),
    )
}

fn binomial_law(trials: u64, p: f64) -> Result<Binomial> {
    Binomial::new(trials, p.clamp(0.0, 1.0))
        .map_err(|e| CoverError::domain("binomial", e.to_string()))
}

pub(crate) fn binomial_table(trials: u64, p: f64, q: f64) -> SumLaw {
    if p == 0.0 {
        return SumLaw::Lattice {
            offset: 0,
            pmf: vec![1.0],
        };
    }
    if q == 0.0 {
        return SumLaw::Lattice {
            offset: trials as i64,
            pmf: vec![1.0],
        };
    }
    SumLaw::Lattice {
        offset: 0,
        pmf: (0..=trials).map(|x| dbinom(x, trials, p, q)).collect(),
    }
}

/// Poisson(λ) pmf on a window whose omitted tails each carry at most `tail_eps`.
///
/// Starting from the mode, the pmf ratio bounds each omitted tail by a
/// geometric series, so the scan stops as soon as that bound drops below
/// `tail_eps`.
pub(crate) fn poisson_window(lambda: f64, tail_eps: f64) -> SumLaw {
    if lambda == 0.0 {
        return SumLaw::Lattice {
            offset: 0,
            pmf: vec![1.0],
        };
    }
    let mode = lambda.floor() as u64;
    let mut lower = Vec::new();
    let mut k = mode;
    while k > 0 {
        k -= 1;
        let p = dpois(k, lambda);
        lower.push(p);
        let r = k as f64 / lambda;
        if k == 0 || p * r / (1.0 - r) <= tail_eps {
            break;
        }
    }
    let start = mode - lower.len() as u64;
    let mut pmf: Vec<f64> = lower.into_iter().rev().collect();
    let mut k = mode;
    loop {
        let p = dpois(k, lambda);
        pmf.push(p);
        let r = lambda / (k + 1) as f64;
        if r < 1.0 && p * r / (1.0 - r) <= tail_eps {
            break;
        }
        k += 1;
    }
    SumLaw::Lattice {
        offset: start as i64,
        pmf,
    }
}

/// Draws of ΣXᵢ at a fixed mean and sample size.
#[derive(Debug, Clone)]
pub enum SumSampler {
    Constant(f64),
    Normal(Normal<f64>),
    Poisson(Poisson<f64>),
    Binomial(Binomial),
}

impl SumSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            SumSampler::Constant(c) => *c,
            SumSampler::Normal(law) => law.sample(rng),
            SumSampler::Poisson(law) => law.sample(rng),
            SumSampler::Binomial(law) => law.sample(rng) as f64,
        }
    }
}

/// The law of the sufficient statistic.
#[derive(Debug, Clone, PartialEq)]
pub enum SumLaw {
    /// P(S = offset + i) = pmf[i].
    Lattice {
        offset: i64,
        pmf: Vec<f64>,
    },
    Normal {
        mean: f64,
        variance: f64,
    },
}

/// Exact law of ΣXᵢ, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SumDistribution {
    pub family: FamilySpec,
    pub n: u64,
    pub law: SumLaw,
}

impl SumDistribution {
    pub fn is_point_mass(&self) -> bool {
        matches!(&self.law, SumLaw::Lattice { pmf, .. } if pmf.len() == 1)
    }

    pub fn support_offset(&self) -> Option<i64> {
        match &self.law {
            SumLaw::Lattice { offset, .. } => Some(*offset),
            SumLaw::Normal { .. } => None,
        }
    }

    pub fn pmf(&self) -> Option<&[f64]> {
        match &self.law {
            SumLaw::Lattice { pmf, .. } => Some(pmf),
            SumLaw::Normal { .. } => None,
        }
    }

    /// P(S = s); zero outside the stored window.
    pub fn prob(&self, s: i64) -> f64 {
        match &self.law {
            SumLaw::Lattice { offset, pmf } => {
                let i = s - offset;
                if i < 0 || i as usize >= pmf.len() {
                    0.0
                } else {
                    pmf[i as usize]
                }
            }
            SumLaw::Normal { .. } => 0.0,
        }
    }

    /// Stored probability mass (1 for the normal law).
    pub fn total_mass(&self) -> f64 {
        match &self.law {
            SumLaw::Lattice { pmf, .. } => pmf.iter().copied().sum::<CompensatedSum>().value(),
            SumLaw::Normal { .. } => 1.0,
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.law {
            SumLaw::Lattice { offset, pmf } => pmf
                .iter()
                .enumerate()
                .map(|(i, p)| (*offset + i as i64) as f64 * p)
                .sum::<CompensatedSum>()
                .value(),
            SumLaw::Normal { mean, .. } => *mean,
        }
    }

    /// (support value, probability) pairs of a lattice law.
    pub fn atoms(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let (offset, pmf): (i64, &[f64]) = match &self.law {
            SumLaw::Lattice { offset, pmf } => (*offset, pmf),
            SumLaw::Normal { .. } => (0, &[]),
        };
        pmf.iter()
            .enumerate()
            .map(move |(i, &p)| (offset + i as i64, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;

    const EPS: f64 = 1e-12;

    #[test]
    fn natural_param_examples() {
        assert_eq!(FamilySpec::Poisson.natural_param(1.0).unwrap(), 0.0);
        assert_eq!(
            FamilySpec::Binomial { m: 1 }.natural_param(0.5).unwrap(),
            0.0
        );
        let normal = FamilySpec::normal(1.0).unwrap();
        assert_eq!(normal.natural_param(2.5).unwrap(), 2.5);
    }

    #[test]
    fn natural_param_rejects_endpoints() {
        assert!(FamilySpec::Poisson.natural_param(0.0).is_err());
        assert!(FamilySpec::Binomial { m: 3 }.natural_param(3.0).is_err());
        assert!(FamilySpec::Poisson.natural_param(-1.0).is_err());
    }

    #[test]
    fn round_trip_through_natural_parameter() {
        let fams = [
            FamilySpec::Poisson,
            FamilySpec::Binomial { m: 1 },
            FamilySpec::Binomial { m: 7 },
            FamilySpec::NormalKnownVar { variance: 2.5 },
        ];
        for fam in fams {
            let (_, hi) = fam.mean_domain();
            let hi = if hi.is_finite() { hi } else { 50.0 };
            for i in 1..100 {
                let theta = hi * i as f64 / 100.0;
                let psi = fam.natural_param(theta).unwrap();
                let back = fam.mean_from_natural(psi);
                assert!(
                    (back - theta).abs() <= 1e-12 * theta.abs().max(1.0),
                    "{fam} {theta}"
                );
            }
        }
    }

    #[test]
    fn variance_examples() {
        assert_eq!(FamilySpec::Poisson.variance_at_mean(2.0).unwrap(), 2.0);
        assert_eq!(
            FamilySpec::Binomial { m: 1 }.variance_at_mean(0.5).unwrap(),
            0.25
        );
        assert_eq!(
            FamilySpec::normal(1.0)
                .unwrap()
                .variance_at_mean(-3.0)
                .unwrap(),
            1.0
        );
        assert_eq!(
            FamilySpec::Binomial { m: 1 }.variance_at_mean(1.0).unwrap(),
            0.0
        );
        assert_eq!(FamilySpec::Poisson.variance_at_mean(0.0).unwrap(), 0.0);
        assert!(FamilySpec::Binomial { m: 1 }.variance_at_mean(1.2).is_err());
        assert!(FamilySpec::Binomial { m: 2 }.variance_at_mean(0.3).unwrap() > 0.0);
    }

    #[test]
    fn invalid_families() {
        assert!(FamilySpec::normal(0.0).is_err());
        assert!(FamilySpec::binomial(0).is_err());
        assert!(MeanParam::new(FamilySpec::Poisson, -0.1).is_err());
        assert!(MeanParam::new(FamilySpec::Binomial { m: 1 }, 1.0)
            .unwrap()
            .is_degenerate());
    }

    #[test]
    fn degenerate_sampling() {
        let mut rng = RngState::new(1).rng();
        let xs = FamilySpec::Binomial { m: 1 }
            .sample(0.0, 50, &mut rng)
            .unwrap();
        assert!(xs.iter().all(|&x| x == 0.0));
        assert!(FamilySpec::Poisson.sample(1.0, 0, &mut rng).is_err());
    }

    #[test]
    fn sample_moments() {
        let mut rng = RngState::new(2).rng();
        let n = 1_000_000;
        let xs = FamilySpec::Poisson.sample(3.0, n, &mut rng).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!(
            (mean - 3.0).abs() <= 4.0 * (3.0 / n as f64).sqrt(),
            "{mean}"
        );
        let ys = FamilySpec::normal(1.0)
            .unwrap()
            .sample(0.0, n, &mut rng)
            .unwrap();
        let m = ys.iter().sum::<f64>() / n as f64;
        let var = ys.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var - 1.0).abs() <= 0.01, "{var}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let fam = FamilySpec::Binomial { m: 4 };
        let a = fam.sample(1.3, 20, &mut RngState::new(9).rng()).unwrap();
        let b = fam.sample(1.3, 20, &mut RngState::new(9).rng()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn binomial_sum_table() {
        let d = FamilySpec::Binomial { m: 1 }
            .sum_distribution(0.5, 2, EPS)
            .unwrap();
        assert_eq!(d.support_offset(), Some(0));
        let pmf = d.pmf().unwrap();
        assert_eq!(pmf.len(), 3);
        for (got, want) in pmf.iter().zip([0.25, 0.5, 0.25]) {
            assert!((got - want).abs() <= 1e-15);
        }
        let d = FamilySpec::Binomial { m: 3 }
            .sum_distribution(3.0, 5, EPS)
            .unwrap();
        assert!(d.is_point_mass());
        assert_eq!(d.support_offset(), Some(15));
    }

    #[test]
    fn poisson_sum_table() {
        let d = FamilySpec::Poisson.sum_distribution(2.0, 400, EPS).unwrap();
        assert!(d.total_mass() >= 1.0 - 2.0 * EPS);
        assert!(d.total_mass() <= 1.0 + 1e-14);
        assert!((d.mean() - 800.0).abs() <= 1e-9 * 400.0);
        let one = FamilySpec::Poisson.sum_distribution(2.0, 1, EPS).unwrap();
        assert!((one.prob(0) - 0.1353352832366127).abs() < 1e-15);
        let zero = FamilySpec::Poisson.sum_distribution(0.0, 10, EPS).unwrap();
        assert!(zero.is_point_mass());
    }

    #[test]
    fn poisson_window_tails_are_bounded() {
        for &lambda in &[0.3, 4.0, 37.5, 800.0, 5000.0] {
            for &eps in &[1e-6, 1e-12] {
                let d = FamilySpec::Poisson
                    .sum_distribution(lambda, 1, eps)
                    .unwrap();
                let off = d.support_offset().unwrap();
                let len = d.pmf().unwrap().len() as i64;
                let left: f64 = (0..off).map(|k| dpois(k as u64, lambda)).sum();
                let right: f64 = (off + len..off + len + 10_000)
                    .map(|k| dpois(k as u64, lambda))
                    .sum();
                assert!(
                    left <= eps && right <= eps,
                    "lambda {lambda}: {left:e} {right:e}"
                );
            }
        }
    }

    #[test]
    fn normal_sum_record() {
        let d = FamilySpec::normal(2.0)
            .unwrap()
            .sum_distribution(1.5, 10, EPS)
            .unwrap();
        assert_eq!(
            d.law,
            SumLaw::Normal {
                mean: 15.0,
                variance: 20.0
            }
        );
    }

    #[test]
    fn tail_eps_contract() {
        assert!(FamilySpec::Poisson.sum_distribution(1.0, 1, 0.0).is_err());
        assert!(FamilySpec::Poisson.sum_distribution(1.0, 1, 1e-3).is_err());
    }

    /// Chi-squared goodness of fit of `sample` against the n = 1 table.
    #[test]
    fn sample_matches_sum_distribution() {
        let fams = [
            (FamilySpec::Poisson, 3.0),
            (FamilySpec::Binomial { m: 5 }, 1.7),
        ];
        for (fam, theta) in fams {
            let draws = 100_000;
            let xs = fam
                .sample(theta, draws, &mut RngState::new(31).rng())
                .unwrap();
            let table = fam.sum_distribution(theta, 1, EPS).unwrap();
            let mut bins: Vec<(f64, f64)> = Vec::new();
            let mut carry = (0.0, 0.0);
            for (s, p) in table.atoms() {
                let obs = xs.iter().filter(|&&x| x as i64 == s).count() as f64;
                carry.0 += obs;
                carry.1 += p * draws as f64;
                if carry.1 >= 20.0 {
                    bins.push(carry);
                    carry = (0.0, 0.0);
                }
            }
            if let Some(last) = bins.last_mut() {
                last.0 += carry.0;
                last.1 += carry.1;
            }
            let stat: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
            let df = bins.len() as f64 - 1.0;
            // Wilson-Hilferty upper 1e-3 point of chi-squared(df).
            let z = 3.090232306167813;
            let crit = df * (1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt()).powi(3);
            assert!(stat < crit, "{fam}: chi2 = {stat}, crit = {crit}");
        }
    }
}
