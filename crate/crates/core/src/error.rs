use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("undefined resultant: zero polynomial input")]
    UndefinedResultant,
    #[error("root iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize, partial: Vec<Complex64> },
    #[error("singular curve: discriminant is zero")]
    SingularCurve,
    #[error("point is not on the curve")]
    OffCurve,
    #[error("local height has a pole at the point at infinity")]
    Pole,
    #[error("unsupported reduction at p = {p}: {kind}")]
    UnsupportedReduction { p: u64, kind: String },
    #[error("gap vanishes: {0}")]
    GapVanishes(String),
}

impl LabError {
    pub fn pre(msg: impl Into<String>) -> Self {
        LabError::Precondition(msg.into())
    }

    pub fn inv(msg: impl Into<String>) -> Self {
        LabError::Invariant(msg.into())
    }

    /// True for failures of an asserted invariant, as opposed to bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, LabError::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
