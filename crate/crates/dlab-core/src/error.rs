use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two inputs that must share a length do not.
    DimensionMismatch { expected: usize, got: usize },
    /// A probability vector failed validation.
    InvalidDistribution(&'static str),
    /// An argument violates a documented precondition.
    InvalidInput(&'static str),
    /// Every model in a class was excluded by the data.
    PosteriorCollapsed,
    /// A confidence set eliminated every candidate.
    EmptyConfidenceSet,
    /// An internal solver failed in a way the inputs should have ruled out.
    Internal(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::InvalidDistribution(why) => write!(f, "invalid distribution: {why}"),
            Error::InvalidInput(why) => write!(f, "invalid input: {why}"),
            Error::PosteriorCollapsed => write!(f, "posterior collapsed: every model excluded"),
            Error::EmptyConfidenceSet => write!(f, "confidence set is empty"),
            Error::Internal(why) => write!(f, "internal error: {why}"),
        }
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<(), Error> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
