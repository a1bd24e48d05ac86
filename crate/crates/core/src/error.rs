use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("invalid group descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cocharacter is not minuscule: {0}")]
    NonMinuscule(String),
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("isocrystal is not admissible: {0}")]
    NotAdmissible(String),
    #[error("unsupported for this group family: {0}")]
    Unsupported(String),
}

impl StrataError {
    /// Short machine-readable tag used in serialized error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            StrataError::InvalidDescriptor(_) => "invalid_descriptor",
            StrataError::InvalidInput(_) => "invalid_input",
            StrataError::DimensionMismatch { .. } => "dimension_mismatch",
            StrataError::NonMinuscule(_) => "non_minuscule",
            StrataError::Infeasible(_) => "infeasible",
            StrataError::NotAdmissible(_) => "not_admissible",
            StrataError::Unsupported(_) => "unsupported",
        }
    }
}

pub type Result<T> = std::result::Result<T, StrataError>;
