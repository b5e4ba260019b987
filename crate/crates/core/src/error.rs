use alloc::string::String;

/// Errors raised by sample construction, assembly and solving.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("duplicate points {0} and {1}")]
    DuplicatePoint(usize, usize),
    #[error("normal {index} is not unit length (norm {norm})")]
    NonUnitNormal { index: usize, norm: f64 },
    #[error("normal frame at point {0} is not orthonormal")]
    FrameNotOrthonormal(usize),
    #[error("kernel evaluated at coincident points without softening")]
    SingularEvaluation,
    #[error("degenerate point pair (coincident or antipodal)")]
    DegeneratePair,
    #[error("ill-posed system: {0}")]
    IllPosedSystem(String),
    #[error("negative scalar weight {value} at sample {index}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("region has no interior: {0}")]
    NoInterior(String),
    #[error("self-intersecting offset sample: points {0} and {1} coincide")]
    SelfIntersection(usize, usize),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: &str) -> Error {
    Error::InvalidArgument(String::from(msg))
}
