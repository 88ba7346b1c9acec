use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("elements belong to different group backends")]
    BackendMismatch,

    #[error("operation requires the {0} backend")]
    UnsupportedBackend(&'static str),

    #[error("group order exceeds the configured bound of {bound}")]
    OrderBoundExceeded { bound: usize },

    #[error("coset index exceeds the configured bound of {bound}")]
    IndexBoundExceeded { bound: usize },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("subgroup check failed: {0}")]
    NotASubgroup(String),

    #[error("level {finer} is not contained in level {coarser}")]
    LevelNotContained { finer: String, coarser: String },

    #[error("coset vector mismatch: {0}")]
    VectorMismatch(String),

    #[error("automorphism does not preserve the subgroup: {0}")]
    AutomorphismNotPreserving(String),

    #[error("invalid relation instance: {0}")]
    InvalidInstance(String),

    #[error("representation error: {0}")]
    Representation(String),

    #[error("tree invariant violated: {0}")]
    TreeInvariant(String),

    #[error("free-word labeling undefined for p = {0} (p + 1 must be even)")]
    PsiUndefined(i64),

    #[error("radius {radius} exceeds the configured bound {bound}")]
    RadiusBoundExceeded { radius: usize, bound: usize },

    #[error("inconsistent regrouping: {0}")]
    Regrouping(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
