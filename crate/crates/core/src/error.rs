use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("theta is not normalized: theta0^2 + sum theta_i^2 = {sum_sq} (must be 1 within {tolerance})")]
    Norm { sum_sq: f64, tolerance: f64 },

    #[error("theta has a negative entry {value} at position {index}")]
    Sign { index: usize, value: f64 },

    #[error("theta0 must be positive when the atom list is finite and nonempty")]
    ZeroTheta0,

    #[error("jump time {time} collides with a breakpoint or another jump time")]
    JumpCollision { time: f64 },

    #[error("path is not excursion-type: {reason}")]
    NotExcursion { reason: String },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid probability sequence: {0}")]
    InvalidPSeq(String),

    #[error("two particles share the position {0}")]
    DuplicatePosition(f64),

    #[error("the minimum of the particle bridge is attained by more than one particle")]
    Tie,

    #[error("exact identity {identity} violated by {discrepancy:e}")]
    IdentityViolation { identity: &'static str, discrepancy: f64 },

    #[error("order statistics {0} and {1} coincide")]
    Degenerate(f64, f64),

    #[error("sampled vertex {0} was drawn twice")]
    DuplicateSample(usize),

    #[error("empty sample")]
    EmptySample,

    #[error("expected count {expected} in category {category} is below 5")]
    LowExpectedCount { category: usize, expected: f64 },

    #[error("path takes the negative value {value} at time {time}")]
    NegativePath { time: f64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short name of the violated invariant, for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Norm { .. } => "NormError",
            Error::Sign { .. } => "SignError",
            Error::ZeroTheta0 => "ZeroTheta0Error",
            Error::JumpCollision { .. } => "JumpCollisionError",
            Error::NotExcursion { .. } => "NotExcursionError",
            Error::InvalidPath(_) => "InvalidPathError",
            Error::InvalidPSeq(_) => "InvalidPSeqError",
            Error::DuplicatePosition(_) => "DuplicatePositionError",
            Error::Tie => "TieError",
            Error::IdentityViolation { .. } => "IdentityViolation",
            Error::Degenerate(..) => "DegenerateError",
            Error::DuplicateSample(_) => "DuplicateSampleError",
            Error::EmptySample => "EmptySampleError",
            Error::LowExpectedCount { .. } => "LowExpectedCountError",
            Error::NegativePath { .. } => "NegativePathError",
            Error::InvalidArgument(_) => "InvalidArgumentError",
        }
    }
}
