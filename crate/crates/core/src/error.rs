use core::fmt;

pub type Result<T> = core::result::Result<T, PricingError>;

#[derive(Debug, Clone, PartialEq)]
pub enum PricingError {
    /// A named input violates its domain (non-positive spot, sigma <= 0, ...).
    InvalidInput {
        field: &'static str,
        reason: &'static str,
    },
    /// `tau = 0` passed to a d-argument builder; expiry is handled by callers.
    DegenerateHorizon,
    /// Zero total variance in a delta argument or normal-distribution payoff.
    DegenerateVariance,
    /// `beta = 0` in a generalised binary condition.
    ConstantCondition,
    OrderTooLarge {
        order: usize,
        max: usize,
    },
    NestingTooDeep {
        depth: usize,
        max: usize,
    },
    NotPositiveDefinite,
    /// Fixing count does not match the number of monitoring dates at or before `t`.
    FixingCount {
        expected: usize,
        found: usize,
    },
    /// Valuation time lies after the contract expiry.
    PastExpiry,
    NotConverged {
        last: f64,
        previous: f64,
    },
    Unsupported(&'static str),
}

impl PricingError {
    pub(crate) fn invalid(field: &'static str, reason: &'static str) -> Self {
        PricingError::InvalidInput { field, reason }
    }
}

impl fmt::Display for PricingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PricingError::InvalidInput { field, reason } => {
                write!(f, "invalid {field}: {reason}")
            }
            PricingError::DegenerateHorizon => write!(f, "degenerate horizon (tau = 0)"),
            PricingError::DegenerateVariance => write!(f, "degenerate variance"),
            PricingError::ConstantCondition => {
                write!(f, "constant condition (beta = 0): payoff is the standard option or zero")
            }
            PricingError::OrderTooLarge { order, max } => {
                write!(f, "order too large: {order} > {max}")
            }
            PricingError::NestingTooDeep { depth, max } => {
                write!(f, "nesting too deep: {depth} > {max}")
            }
            PricingError::NotPositiveDefinite => write!(f, "correlation matrix is not positive definite"),
            PricingError::FixingCount { expected, found } => {
                write!(f, "expected {expected} fixings at this valuation time, found {found}")
            }
            PricingError::PastExpiry => write!(f, "valuation time is after expiry"),
            PricingError::NotConverged { last, previous } => write!(
                f,
                "quadrature did not converge (last estimate {last:e}, previous {previous:e})"
            ),
            PricingError::Unsupported(what) => write!(f, "unsupported: {what}"),
        }
    }
}

impl core::error::Error for PricingError {}
