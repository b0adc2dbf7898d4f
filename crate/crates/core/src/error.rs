use thiserror::Error;

/// Errors raised by the coverage engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverError {
    /// An argument fell outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Exact enumeration was requested for a family without a discrete sufficient statistic.
    #[error("{family} is not supported by {op}; use the Monte Carlo engine instead")]
    UnsupportedFamily { op: &'static str, family: String },

    /// A grid point failed while sweeping a coverage curve.
    #[error("grid point {index}: {source}")]
    GridPoint {
        index: usize,
        #[source]
        source: Box<CoverError>,
    },
}

impl CoverError {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        CoverError::Domain {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = CoverError> = std::result::Result<T, E>;
