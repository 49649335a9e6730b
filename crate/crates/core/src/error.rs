//! Error type shared by every module.
//!
//! Each variant carries a stable kebab-case tag (see [`Error::tag`]) that the
//! command-line front end and the experiment reports use verbatim.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("insufficient-resolution: {0}")]
    InsufficientResolution(String),
    #[error("not-an-immersion: {0}")]
    NotAnImmersion(String),
    #[error("grid-mismatch: {0}")]
    GridMismatch(String),
    #[error("domain-violation: {0}")]
    DomainViolation(String),
    #[error("monotonicity-violation: {0}")]
    MonotonicityViolation(String),
    #[error("orientation-mismatch: {0}")]
    OrientationMismatch(String),
    #[error("overflow-guard: {0}")]
    OverflowGuard(String),
    #[error("invalid-diffeo: {0}")]
    InvalidDiffeo(String),
    #[error("invalid-coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("invalid-path: {0}")]
    InvalidPath(String),
    #[error("path-left-the-space: {0}")]
    PathLeftTheSpace(String),
    #[error("invalid-parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported-dimension: {0}")]
    UnsupportedDimension(String),
    #[error("insufficient-regularity: {0}")]
    InsufficientRegularity(String),
    #[error("inapplicable-certificate: {0}")]
    InapplicableCertificate(String),
    #[error("disconnected-components: {0}")]
    DisconnectedComponents(String),
    #[error("not-a-segment: {0}")]
    NotASegment(String),
    #[error("parametrization-mismatch: {0}")]
    ParametrizationMismatch(String),
    #[error("internal-invariant: {0}")]
    InvariantViolation(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InsufficientResolution(_) => "insufficient-resolution",
            Error::NotAnImmersion(_) => "not-an-immersion",
            Error::GridMismatch(_) => "grid-mismatch",
            Error::DomainViolation(_) => "domain-violation",
            Error::MonotonicityViolation(_) => "monotonicity-violation",
            Error::OrientationMismatch(_) => "orientation-mismatch",
            Error::OverflowGuard(_) => "overflow-guard",
            Error::InvalidDiffeo(_) => "invalid-diffeo",
            Error::InvalidCoefficients(_) => "invalid-coefficients",
            Error::InvalidPath(_) => "invalid-path",
            Error::PathLeftTheSpace(_) => "path-left-the-space",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::UnsupportedDimension(_) => "unsupported-dimension",
            Error::InsufficientRegularity(_) => "insufficient-regularity",
            Error::InapplicableCertificate(_) => "inapplicable-certificate",
            Error::DisconnectedComponents(_) => "disconnected-components",
            Error::NotASegment(_) => "not-a-segment",
            Error::ParametrizationMismatch(_) => "parametrization-mismatch",
            Error::InvariantViolation(_) => "internal-invariant",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Format(_) => "format",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
