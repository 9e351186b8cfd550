use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which invariant a system parameter broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamViolation {
    NotFinite,
    NotPositive,
    /// Expected a probability strictly inside (0, 1).
    NotProbability,
    /// Capacity gaps must exceed unity in linear scale, i.e. be positive in dB.
    GapNotAboveUnity,
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParamViolation::NotFinite => "must be finite",
            ParamViolation::NotPositive => "must be strictly positive",
            ParamViolation::NotProbability => "must lie strictly between 0 and 1",
            ParamViolation::GapNotAboveUnity => "must be strictly positive in dB (linear gap > 1)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {violation}")]
    InvalidParam {
        field: &'static str,
        violation: ParamViolation,
    },
    #[error("{op}: argument {value} outside domain ({expected})")]
    Domain {
        op: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error(
        "quadrature on [{lo}, {hi}] did not converge: estimate {estimate}, error {error_estimate} after {evaluations} evaluations"
    )]
    Quadrature {
        lo: f64,
        hi: f64,
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
    },
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("simulation budget too small: {requested} requested, at least {required} required")]
    Budget { requested: u64, required: u64 },
}

impl Error {
    pub(crate) fn domain(op: &'static str, value: impl Into<f64>, expected: &'static str) -> Self {
        Error::Domain {
            op,
            value: value.into(),
            expected,
        }
    }
}
