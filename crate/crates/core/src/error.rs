use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed matrix text: {0}")]
    MatrixFormat(String),

    #[error("collision not guaranteed: m = {m} <= ell^k with k = {k}, ell = {ell}")]
    NotGuaranteed { k: usize, m: usize, ell: u64 },

    #[error("player {player} has no monochromatic subset of size {size}")]
    NoMonochromaticSubset { player: usize, size: usize },

    #[error("protocol output ({0}, {1}) is not a collision")]
    NotACollision(usize, usize),

    #[error("assignment satisfies the formula")]
    SatisfyingAssignment,

    #[error("enumeration too large: {0} cases")]
    EnumerationTooLarge(u128),

    #[error("unsound proof: {0}")]
    UnsoundProof(String),

    #[error("malformed proof: {0}")]
    MalformedProof(String),

    #[error("malformed decision tree: {0}")]
    MalformedTree(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
