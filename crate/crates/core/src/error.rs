use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite (eigenvalue ratio {ratio:e})")]
    NonPositiveDefinite { ratio: f64 },

    #[error("mixture has zero total weight")]
    ZeroWeight,

    /// The update leaves no probability mass on the requested side of the FoV.
    #[error("contradiction: no probability mass retained ({0})")]
    Contradiction(String),

    #[error("split library has no entry for R = {r}")]
    MissingSplitEntry { r: usize },

    #[error("split parameters violate invariant: {0}")]
    InvalidSplit(String),

    #[error("{method} cannot be used here: {reason}")]
    MethodMismatch {
        method: &'static str,
        reason: String,
    },

    #[error("too many components for exhaustive enumeration ({m} > {max}); use the DP method")]
    TooLarge { m: usize, max: usize },

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("library file: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
