use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CfError {
    /// The backing cannot certify the partial quotient at this (1-based) index.
    #[error("bit budget exhausted before partial quotient a_{index} could be certified")]
    BudgetExhausted { index: usize },
    /// A rational expansion ended before the requested (1-based) index.
    #[error("rational expansion terminated before partial quotient a_{index}")]
    RationalTerminated { index: usize },
    #[error("continued fraction is not eventually periodic")]
    NotPeriodic,
    #[error("invalid continued fraction: {0}")]
    Invalid(String),
    #[error("cannot parse continued fraction literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
}

impl CfError {
    pub fn is_budget(&self) -> bool {
        matches!(self, CfError::BudgetExhausted { .. })
    }
}
