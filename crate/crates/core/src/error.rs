use thiserror::Error;

/// Errors raised by the solvers and the instance layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Q storage is not upper-triangular without duplicates: entry ({i}, {j})")]
    NotSymmetricStorage { i: usize, j: usize },

    #[error("Q is not diagonally dominant at variable {index} (residual {residual:e})")]
    NotDiagonallyDominant { index: usize, residual: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("instance carries no observations; supply M explicitly")]
    NoObservations,

    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("matrix is not positive definite: pivot {pivot:e} at position {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("segment [{start}, {end}) of the relaxation is not positive definite")]
    SegmentNotPd { start: usize, end: usize },

    #[error("retained term ({i}, {j}) is not a consecutive pair under the ordering")]
    NotConsecutive { i: usize, j: usize },

    #[error("x is nonzero at variable {index} although z is zero there")]
    InfeasiblePair { index: usize },

    #[error("support restricted to z is singular")]
    SingularSupport,

    #[error("graph is not bipartite")]
    NotBipartite,

    #[error("cover still contains a cycle")]
    HasCycle,

    #[error("support graph is not a union of vertex-disjoint paths")]
    NotPathForest,

    #[error("problem too large for exhaustive search: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },
}

impl Error {
    /// True for failures of the numerics (loss of definiteness), as
    /// opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. } | Error::SegmentNotPd { .. } | Error::SingularSupport
        )
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
