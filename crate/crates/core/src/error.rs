use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian: max |M_ij - conj(M_ji)| = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("operator is not unitary: max |U^dag U - I| = {defect:e}")]
    NotUnitary { defect: f64 },

    #[error(
        "eigenphase {eigenphase} is within the branch margin of +/-pi; \
         shorten the evolution time so the generator is unambiguous"
    )]
    BranchAmbiguity { eigenphase: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error(
        "Nyquist violation: {detail} (a signal with no content above B is only \
         determined by samples spaced less than 1/(2B) apart)"
    )]
    Nyquist { detail: String },

    #[error("spectrum peak is not usable: {0}")]
    Peak(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
