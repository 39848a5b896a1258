use thiserror::Error;

/// Errors produced by the library. Algorithmic failures (out-of-regime
/// inputs) are distinguished from malformed input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation is undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("duplicate abscissa {0} in interpolation points")]
    DuplicateAbscissa(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("no shifted differential equation of order <= {max_order} with shift {shift}")]
    NotFound { shift: usize, max_order: usize },
    #[error("a node lies outside the rationals (irreducible factor of degree >= 2)")]
    IrrationalNodeDetected,
    #[error("every node solves the equation for exponent {exponent}")]
    UnboundedSolutions { exponent: usize },
    #[error("reconstruction failed: {0}")]
    ReconstructionFailed(String),
    #[error("no delta up to {max_delta} gives a verified reconstruction")]
    DeltaExhausted { max_delta: usize },
    #[error("linear form has no variable part")]
    ConstantForm,
    #[error("affine change of coordinates is singular")]
    SingularChange,
    #[error("instance specification cannot be satisfied: {0}")]
    UnsatisfiableSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures that mean "the input is outside the regime this
    /// algorithm handles", as opposed to malformed input.
    pub fn is_algorithmic(&self) -> bool {
        matches!(
            self,
            Error::NotFound { .. }
                | Error::IrrationalNodeDetected
                | Error::UnboundedSolutions { .. }
                | Error::ReconstructionFailed(_)
                | Error::DeltaExhausted { .. }
                | Error::Inconsistent
                | Error::SingularChange
                | Error::UnsatisfiableSpec(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
