use thiserror::Error;

pub type Result<T> = std::result::Result<T, QpmaError>;

/// Errors raised by the simulator and the verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QpmaError {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime {prime} is smaller than the party count {parties}")]
    PrimeBelowParties { prime: u64, parties: usize },

    #[error("dimension guard: {prime}^{parties} exceeds {limit} amplitudes")]
    DimensionGuard {
        prime: u32,
        parties: usize,
        limit: usize,
    },

    #[error("enumeration guard: {what} = {value} exceeds {limit}")]
    EnumerationGuard {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("site {site} out of range for {parties} parties")]
    SiteOutOfRange { site: usize, parties: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("probabilities must be nonnegative and sum to 1 (sum {0})")]
    InvalidProbabilities(f64),

    #[error("partial trace needs at least one kept site")]
    EmptyKeepSet,

    #[error("duplicate label `{0}` in universal set")]
    DuplicateLabel(String),

    #[error("label `{0}` is not in the universal set")]
    UnknownLabel(String),

    #[error("input {value} is outside the field of order {prime}")]
    InputOutOfField { value: u64, prime: u32 },

    #[error("no answer received from party {0}")]
    MissingAnswer(usize),

    /// A scenario invariant is violated; `invariant` names it.
    #[error("invalid scenario ({invariant}): {detail}")]
    InvalidScenario {
        invariant: &'static str,
        detail: String,
    },
}

impl QpmaError {
    pub(crate) fn scenario(invariant: &'static str, detail: impl Into<String>) -> Self {
        QpmaError::InvalidScenario {
            invariant,
            detail: detail.into(),
        }
    }
}
