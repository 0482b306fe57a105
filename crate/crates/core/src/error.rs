use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is degenerate (determinant zero)")]
    DegenerateMatrix,

    #[error("group of order {order} exceeds the enumeration cap {cap}")]
    GroupTooLarge { order: String, cap: u64 },

    #[error("enumeration of {terms} terms exceeds the cap {cap}")]
    EnumerationTooLarge { terms: String, cap: u64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("denominator vanishes: {0}")]
    ZeroDenominator(String),

    #[error("inconsistent phase in class sigma = {class} mod 8: {detail}")]
    InconsistentPhase { class: u8, detail: String },

    #[error("not a Lagrangian frame: {0}")]
    NotLagrangian(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("invalid level k = {0}: must be even and positive")]
    InvalidLevel(u64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
