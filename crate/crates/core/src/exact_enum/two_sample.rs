//! Two-sample exact enumeration.
//!
//! For a fixed first-sample bootstrap count s₁*, every target statistic is
//! nondecreasing in s₂*, so P(T* ≤ t) is a sum over s₁* of the first-sample
//! pmf times the second-sample CDF at a threshold found by binary search.
//! Quantiles are located by binary search over the sorted set of all values
//! the statistic can take.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::{require_discrete, stable_sum, truth_row, ExactConfig, Fit, Row, CDF_TOL};
use crate::bootstrap_mc::{Interval, Target};
use crate::error::{CoverError, Result};
use crate::estimators::TwoSampleDesign;
use crate::nef::FamilySpec;
use crate::numerics::{compensated_cumsum, CompensatedSum};

/// Outer cells with probability below this are skipped.
const CELL_FLOOR: f64 = 1e-20;

/// Cells sharing a fitted pair share a bootstrap law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum CellKey {
    /// Constraint binds: both fits equal the pooled mean (s₁ + s₂)/n.
    Pooled(i64),
    Slack(i64, i64),
}

/// The target statistic as a function of the two sufficient statistics,
/// evaluated from integers so equal rationals give equal floats.
#[derive(Debug, Clone, Copy)]
struct Statistic {
    n1: u64,
    n2: u64,
    target: Target,
    constrained: bool,
}

impl Statistic {
    #[inline]
    fn pooled_binds(&self, s1: i64, s2: i64) -> bool {
        self.constrained && (s1 as i128) * (self.n2 as i128) > (s2 as i128) * (self.n1 as i128)
    }

    #[inline]
    fn value(&self, s1: i64, s2: i64) -> f64 {
        if self.pooled_binds(s1, s2) {
            return match self.target {
                Target::Delta => 0.0,
                _ => (s1 + s2) as f64 / (self.n1 + self.n2) as f64,
            };
        }
        let x1 = s1 as f64 / self.n1 as f64;
        let x2 = s2 as f64 / self.n2 as f64;
        match self.target {
            Target::Theta1 => x1,
            Target::Theta2 => x2,
            Target::Delta => x2 - x1,
        }
    }

    fn key(&self, s1: i64, s2: i64) -> CellKey {
        if self.pooled_binds(s1, s2) {
            CellKey::Pooled(s1 + s2)
        } else {
            CellKey::Slack(s1, s2)
        }
    }

    fn fits(&self, key: CellKey) -> (Fit, Fit) {
        match key {
            CellKey::Pooled(t) => {
                let f = Fit::Ratio {
                    num: t as u64,
                    den: self.n1 + self.n2,
                };
                (f, f)
            }
            CellKey::Slack(s1, s2) => (
                Fit::Ratio {
                    num: s1 as u64,
                    den: self.n1,
                },
                Fit::Ratio {
                    num: s2 as u64,
                    den: self.n2,
                },
            ),
        }
    }
}

/// Bootstrap laws for one outer cell.
struct CellLaw {
    row1: Row,
    offset2: i64,
    cdf2: Vec<f64>,
}

/// Interval table for one two-sample target.
#[derive(Debug, Clone)]
pub struct TwoSampleEngine {
    family: FamilySpec,
    cfg: ExactConfig,
    stat: Statistic,
    /// Every value the statistic takes on the bootstrap support, ascending.
    values: Vec<f64>,
    intervals: HashMap<CellKey, Interval>,
}

impl TwoSampleEngine {
    /// Tabulates intervals for every outer cell reachable under any of `truths`.
    pub fn build(
        family: FamilySpec,
        design: &TwoSampleDesign,
        cfg: &ExactConfig,
        target: Target,
        truths: &[(f64, f64)],
    ) -> Result<Self> {
        require_discrete(family, "exact_coverage_two_sample")?;
        cfg.validate()?;
        let stat = Statistic {
            n1: design.n1(),
            n2: design.n2(),
            target,
            constrained: cfg.use_constraint,
        };
        let mut keys = BTreeSet::new();
        for &(t1, t2) in truths {
            let r1 = truth_row(family, t1, stat.n1, cfg.tail_eps)?;
            let r2 = truth_row(family, t2, stat.n2, cfg.tail_eps)?;
            for_each_cell(&r1, &r2, |s1, s2, _| {
                keys.insert(stat.key(s1, s2));
            });
        }
        let keys: Vec<CellKey> = keys.into_iter().collect();

        let mut engine = TwoSampleEngine {
            family,
            cfg: *cfg,
            stat,
            values: Vec::new(),
            intervals: HashMap::new(),
        };
        engine.values = engine.value_set(&keys);
        let intervals: Vec<Interval> = keys
            .par_iter()
            .map(|&k| engine.compute_interval(k))
            .collect();
        engine.intervals = keys.into_iter().zip(intervals).collect();
        Ok(engine)
    }

    fn value_set(&self, keys: &[CellKey]) -> Vec<f64> {
        let (n1, n2, eps) = (self.stat.n1, self.stat.n2, self.cfg.tail_eps);
        let extents = keys
            .par_iter()
            .map(|&k| {
                let (f1, f2) = self.stat.fits(k);
                let (a1, b1) = f1.extent(self.family, n1, eps);
                let (a2, b2) = f2.extent(self.family, n2, eps);
                (a1, b1, a2, b2)
            })
            .reduce(
                || (i64::MAX, i64::MIN, i64::MAX, i64::MIN),
                |x, y| (x.0.min(y.0), x.1.max(y.1), x.2.min(y.2), x.3.max(y.3)),
            );
        let (lo1, hi1, lo2, hi2) = extents;
        if lo1 > hi1 || lo2 > hi2 {
            return Vec::new();
        }
        let mut values: Vec<f64> = (lo1..=hi1)
            .into_par_iter()
            .flat_map_iter(|s1| (lo2..=hi2).map(move |s2| self.stat.value(s1, s2)))
            .collect();
        values.par_sort_unstable_by(f64::total_cmp);
        values.dedup();
        values
    }

    fn cell_law(&self, key: CellKey) -> CellLaw {
        let (f1, f2) = self.stat.fits(key);
        let row1 = f1.row(self.family, self.stat.n1, self.cfg.tail_eps);
        let row2 = f2.row(self.family, self.stat.n2, self.cfg.tail_eps);
        CellLaw {
            row1,
            offset2: row2.offset,
            cdf2: compensated_cumsum(&row2.pmf),
        }
    }

    /// P(T* ≤ t), or P(T* < t) when `strict`.
    fn cdf(&self, law: &CellLaw, t: f64, strict: bool) -> f64 {
        let mut acc = CompensatedSum::new();
        let len2 = law.cdf2.len();
        for (i, &p) in law.row1.pmf.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let s1 = law.row1.offset + i as i64;
            let below = |j: usize| {
                let v = self.stat.value(s1, law.offset2 + j as i64);
                if strict {
                    v < t
                } else {
                    v <= t
                }
            };
            let k = partition_point(len2, below);
            if k > 0 {
                acc.add(p * law.cdf2[k - 1]);
            }
        }
        acc.value()
    }

    fn quantile(&self, law: &CellLaw, alpha: f64) -> f64 {
        let idx = self
            .values
            .partition_point(|&v| self.cdf(law, v, false) < alpha - CDF_TOL);
        self.values[idx.min(self.values.len() - 1)]
    }

    fn compute_interval(&self, key: CellKey) -> Interval {
        let law = self.cell_law(key);
        Interval {
            lower: self.quantile(&law, self.cfg.alpha1),
            upper: self.quantile(&law, 1.0 - self.cfg.alpha2),
        }
    }

    fn truth_value(&self, theta10: f64, theta20: f64) -> f64 {
        match self.stat.target {
            Target::Theta1 => theta10,
            Target::Theta2 => theta20,
            Target::Delta => theta20 - theta10,
        }
    }

    /// The percentile interval produced when the observed statistics are (s₁, s₂).
    pub fn interval(&self, s1: i64, s2: i64) -> Option<Interval> {
        self.intervals.get(&self.stat.key(s1, s2)).copied()
    }

    /// Covered-indicator from two bootstrap CDF evaluations:
    /// P(T* ≤ θ) ≥ α₁ and P(T* < θ) ≤ 1 − α₂.
    ///
    /// Agrees with the quantile form except when P(T* < θ) lies within
    /// [`CDF_TOL`] of 1 − α₂, where [`TwoSampleEngine::interval`] decides.
    /// Also returns P(T* < θ) so callers can detect that case.
    pub fn covered_by_cdf(&self, s1: i64, s2: i64, theta: f64) -> (bool, f64) {
        let law = self.cell_law(self.stat.key(s1, s2));
        let at_or_below = self.cdf(&law, theta, false);
        let below = self.cdf(&law, theta, true);
        let covered =
            at_or_below >= self.cfg.alpha1 - CDF_TOL && below <= 1.0 - self.cfg.alpha2 + CDF_TOL;
        (covered, below)
    }

    /// Exact coverage at (θ₁₀, θ₂₀), which must have been among the build truths.
    pub fn coverage(&self, theta10: f64, theta20: f64) -> Result<f64> {
        let r1 = truth_row(self.family, theta10, self.stat.n1, self.cfg.tail_eps)?;
        let r2 = truth_row(self.family, theta20, self.stat.n2, self.cfg.tail_eps)?;
        let truth = self.truth_value(theta10, theta20);
        let mut terms = Vec::new();
        let mut missing = None;
        for_each_cell(&r1, &r2, |s1, s2, p| match self.interval(s1, s2) {
            Some(ci) => {
                if ci.contains(truth) {
                    terms.push(p);
                }
            }
            None => missing = Some((s1, s2)),
        });
        if let Some((s1, s2)) = missing {
            return Err(CoverError::domain(
                "exact_coverage_two_sample",
                format!("cell ({s1}, {s2}) was not tabulated"),
            ));
        }
        Ok(stable_sum(terms))
    }
}

fn for_each_cell(r1: &Row, r2: &Row, mut f: impl FnMut(i64, i64, f64)) {
    for (i, &p1) in r1.pmf.iter().enumerate() {
        for (j, &p2) in r2.pmf.iter().enumerate() {
            let p = p1 * p2;
            if p >= CELL_FLOOR {
                f(r1.offset + i as i64, r2.offset + j as i64, p);
            }
        }
    }
}

/// Number of leading indices in 0..len for which the monotone predicate holds.
fn partition_point(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}
