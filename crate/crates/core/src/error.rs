use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("NotHermitian: asymmetry {asymmetry:.3e} exceeds {bound:.3e}")]
    NotHermitian { asymmetry: f64, bound: f64 },

    #[error("ConvergenceFailure: {0}")]
    ConvergenceFailure(&'static str),

    #[error("NotPSD: eigenvalue {min_eig:.3e} below floor {floor:.3e}")]
    NotPsd { min_eig: f64, floor: f64 },

    #[error("NotInBA: range residual {residual:.3e} exceeds {bound:.3e}")]
    NotInBA { residual: f64, bound: f64 },

    #[error("DimensionMismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("DegenerateContext: A has rank 0, the A-unit sphere is empty")]
    DegenerateContext,

    #[error("InconsistentTags: {0}")]
    InconsistentTags(String),

    #[error("ConstructionFailed: {0}")]
    ConstructionFailed(String),

    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

impl LabError {
    /// Stable variant name, printed by the CLI on domain errors.
    pub fn name(&self) -> &'static str {
        match self {
            LabError::NotHermitian { .. } => "NotHermitian",
            LabError::ConvergenceFailure(_) => "ConvergenceFailure",
            LabError::NotPsd { .. } => "NotPSD",
            LabError::NotInBA { .. } => "NotInBA",
            LabError::DimensionMismatch { .. } => "DimensionMismatch",
            LabError::DegenerateContext => "DegenerateContext",
            LabError::InconsistentTags(_) => "InconsistentTags",
            LabError::ConstructionFailed(_) => "ConstructionFailed",
            LabError::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
