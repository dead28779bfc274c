use thiserror::Error;

/// Errors raised by the exact geometry, transform and integration pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("origin is not strictly interior to the body")]
    OriginNotInterior,
    #[error("affine functional is negative at simplex vertex {0}")]
    NegativeOnSimplex(usize),
    #[error("empty cone: directions must span a proper angle")]
    EmptyCone,
    #[error("unbounded polyhedron")]
    Unbounded,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("function vanishes identically on its support")]
    ZeroFunction,
    #[error("origin lies on the boundary of the positivity set")]
    OriginOnBoundary,
    #[error("function is not coercive{}", .0.as_ref().map(|r| format!(" along ray {r}")).unwrap_or_default())]
    NotCoercive(Option<String>),
    #[error("function is not positive at the origin")]
    NotPositive,
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),
    #[error("ambient dimension {0} exceeds the Monte Carlo limit of 6")]
    DimensionTooLarge(usize),
    #[error("function is not equipartitioned: {0}")]
    NotEquipartitioned(String),
    #[error("no sign change found while bracketing")]
    BracketNotFound,
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
