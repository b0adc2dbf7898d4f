//! Coverage curves: grids of true-parameter values paired with coverage.

use std::fmt;

/// How a coverage value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    ExactUnconstrained,
    Asymptotic,
    MonteCarlo,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::ExactUnconstrained => "exact_unconstrained",
            Method::Asymptotic => "asymptotic",
            Method::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One point of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// Grid coordinate the point is plotted against.
    pub param: f64,
    pub coverage: f64,
    /// Standard error or half-width where the method is stochastic.
    pub error_estimate: Option<f64>,
    /// Set when the point sits on a threshold where the limit is undefined.
    pub at_boundary: bool,
}

impl CurvePoint {
    pub fn exact(param: f64, coverage: f64) -> Self {
        CurvePoint {
            param,
            coverage,
            error_estimate: None,
            at_boundary: false,
        }
    }
}

/// Coverage values in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve {
    pub method: Method,
    pub points: Vec<CurvePoint>,
}

impl CoverageCurve {
    pub fn new(method: Method) -> Self {
        CoverageCurve {
            method,
            points: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn coverages(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.coverage)
    }
}

/// Mean of |a − b| over two curves sampled on the same grid.
pub fn mean_abs_deviation(a: &CoverageCurve, b: &CoverageCurve) -> Option<f64> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let total: f64 = a
        .coverages()
        .zip(b.coverages())
        .map(|(x, y)| (x - y).abs())
        .sum();
    Some(total / a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviation_of_matching_curves() {
        let mut a = CoverageCurve::new(Method::Exact);
        let mut b = CoverageCurve::new(Method::Asymptotic);
        for (i, (x, y)) in [(0.9, 0.95), (0.93, 0.91)].into_iter().enumerate() {
            a.points.push(CurvePoint::exact(i as f64, x));
            b.points.push(CurvePoint::exact(i as f64, y));
        }
        assert!((mean_abs_deviation(&a, &b).unwrap() - 0.035).abs() < 1e-15);
        assert_eq!(
            mean_abs_deviation(&a, &CoverageCurve::new(Method::Exact)),
            None
        );
        assert_eq!(
            Method::ExactUnconstrained.to_string(),
            "exact_unconstrained"
        );
    }
}
