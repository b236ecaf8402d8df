use thiserror::Error;

/// Errors produced by space queries and estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point kind does not match space kind: {0}")]
    PointSpaceMismatch(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid space configuration: {0}")]
    InvalidSpace(String),

    #[error("graph nodes {0} and {1} are in different components")]
    Disconnected(usize, usize),

    #[error("space lacks required capability: {0}")]
    MissingCapability(&'static str),

    #[error("degenerate triple: x coincides with {0}")]
    DegenerateTriple(&'static str),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("no finite difference quotients at this point")]
    NonFiniteQuotients,

    #[error("geodesic branch {got} out of range (space has {available})")]
    BranchOutOfRange { got: usize, available: usize },

    #[error("empty sampling region")]
    EmptyRegion,

    #[error("sign duality violated: |D+(-f)(grad g) + D-f(grad g)| = {0:.3e}")]
    SignDualityViolation(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
