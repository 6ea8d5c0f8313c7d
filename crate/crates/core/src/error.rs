use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("digit must be a positive integer, got {0}")]
    ZeroDigit(String),
    #[error("malformed digit {token:?} at position {position}")]
    MalformedDigit { position: usize, token: String },
    #[error("empty cylinder: a cylinder needs at least one digit")]
    EmptyCylinder,
    #[error("empty word")]
    EmptyWord,
    #[error("rational {0} is outside the open unit interval")]
    OutsideUnitInterval(String),
    #[error("invalid interval: lower end {lo} is not below upper end {hi}")]
    InvalidInterval { lo: String, hi: String },
    #[error("insufficient precision: bracket determined only {} digits", .obtained.len())]
    InsufficientPrecision { obtained: Vec<crate::Digit> },
    #[error("uniform variate {0} is outside (0, 1)")]
    UniformOutOfRange(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("event family of size {size} exceeds the enumeration bound {bound}")]
    FamilyTooLarge { size: usize, bound: usize },
    #[error("paired events {index} are not disjoint on outcome {outcome:?}")]
    NotDisjoint { index: usize, outcome: Vec<u32> },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no root: degenerate stage (n = 1)")]
    DegenerateStage,
    #[error("enumeration too large: {0} items")]
    EnumerationTooLarge(u128),
    #[error("root not bracketed on [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
