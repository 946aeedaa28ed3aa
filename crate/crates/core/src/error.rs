use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcaError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `1 - p + q` vanishes, so the block unitary cannot be normalized.
    #[error("degenerate rule parameters p={p}, q={q}: normalization 1 - p + q must be positive")]
    DegenerateRule { p: f64, q: f64 },

    /// A matrix handed in as a density matrix is not one.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// The full-space oracle refuses chains longer than its cap.
    #[error("capacity error: {n_sites} sites exceeds the full-space limit of {max}")]
    Capacity { n_sites: usize, max: usize },

    /// The single-excitation block of a full state carries (almost) no weight.
    #[error("degenerate projection: single-excitation weight {weight:e} is below 1e-9")]
    DegenerateProjection { weight: f64 },
}

pub type Result<T> = std::result::Result<T, QcaError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(QcaError::Domain(msg.into()))
}
