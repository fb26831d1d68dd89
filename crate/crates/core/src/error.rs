use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular denominator: {0}")]
    Singular(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    /// An inequality that always holds failed numerically. Always an
    /// implementation bug, never a counterexample.
    #[error("inequality violated in {check}: lhs {lhs} > rhs {rhs}")]
    Violation { check: String, lhs: f64, rhs: f64 },

    #[error("invalid tensor file: {0}")]
    Format(String),
}

impl Error {
    pub fn is_violation(&self) -> bool {
        matches!(self, Error::Violation { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_violations_are_violations() {
        let v = Error::Violation {
            check: "bound".into(),
            lhs: 2.0,
            rhs: 1.0,
        };
        assert!(v.is_violation());
        assert!(v.to_string().contains("bound"));
        assert!(!Error::Format("x".into()).is_violation());
    }
}
