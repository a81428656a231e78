use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate hull: input points do not span the plane")]
    DegenerateHull,

    #[error("generator set is empty after dropping zero vectors")]
    EmptySet,

    #[error("generator set is incomplete: rank {rank} < dimension {dim}")]
    Incomplete { rank: usize, dim: usize },

    #[error("unsupported dimension {0}; only planar sets are supported here")]
    UnsupportedDimension(usize),

    #[error("polygon is not centrally symmetric")]
    Asymmetric,

    #[error("linear map is rank deficient: rank {rank} < {cols}")]
    RankDeficient { rank: usize, cols: usize },

    #[error("edge classes are inconsistent: {0}")]
    Inconsistent(String),

    #[error("root embeddings do not match: {0}")]
    NonMatchingRoot(String),

    #[error("group does not leave the set invariant")]
    NotInvariant,

    #[error("not a group: {0}")]
    NotAGroup(String),

    #[error("equivariant map has zero normalization")]
    DegenerateMu,

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable code used in `ERROR:<code>:` lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::DegenerateHull => "degenerate-hull",
            Error::EmptySet => "empty-set",
            Error::Incomplete { .. } => "incomplete",
            Error::UnsupportedDimension(_) => "unsupported-dimension",
            Error::Asymmetric => "asymmetric",
            Error::RankDeficient { .. } => "rank-deficient",
            Error::Inconsistent(_) => "inconsistent",
            Error::NonMatchingRoot(_) => "non-matching-root",
            Error::NotInvariant => "not-invariant",
            Error::NotAGroup(_) => "not-a-group",
            Error::DegenerateMu => "degenerate-mu",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    /// True for failures caused by mathematically invalid input (exit code 2),
    /// as opposed to I/O or usage problems (exit code 1).
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
                | Error::Format(_)
                | Error::InvalidArgument(_)
        )
    }
}
