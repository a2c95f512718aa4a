use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: ambient {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("element is not homogeneous of degree {expected}")]
    NonHomogeneous { expected: usize },

    #[error("class is not homogeneous")]
    NonHomogeneousClass,

    #[error("ambient dimension {0} unsupported (must be in 1..=64)")]
    AmbientOutOfRange(usize),

    #[error("invalid blade {axes:?} for ambient dimension {ambient_n}")]
    InvalidBlade { axes: Vec<usize>, ambient_n: usize },

    #[error("element does not belong to this ring: {0}")]
    RingMismatch(String),

    #[error("Künneth ideal is undefined below degree 2 (got k = {0})")]
    IdealUndefined(usize),

    #[error("degree {degree} out of range 0..={top}")]
    DegreeOutOfRange { degree: usize, top: usize },

    #[error("connected sum of manifolds of dimensions {left} and {right}")]
    ConnSumDegreeMismatch { left: usize, right: usize },

    #[error("invalid constructor: {0}")]
    InvalidConstructor(String),

    #[error("ring axiom violated: {0}")]
    RingAxiom(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid rational literal {0:?}")]
    BadRational(String),

    #[error("malformed ring data: {0}")]
    MalformedRing(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("not a graded ring homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("ring has no monomial presentation")]
    MissingPresentation,

    #[error("certificate rejected: {0}")]
    CertificateRejected(String),

    #[error("ring hash mismatch: file says {expected}, ring hashes to {actual}")]
    HashMismatch { expected: String, actual: String },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
