use thiserror::Error;

/// Errors surfaced by space oracles and audits.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point not valid for this space: {0}")]
    InvalidPoint(String),
    #[error("invalid space specification: {0}")]
    InvalidSpec(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("query leaves the sampler domain: {0}")]
    DomainExceeded(String),
    #[error("region carries no mass: {0}")]
    EmptyRegion(String),
    #[error("probe inconclusive: {0}")]
    Inconclusive(String),
    #[error("limit construction did not converge: {0}")]
    NoConvergence(String),
    #[error("no closed form for this space family: {0}")]
    Unsupported(String),
    #[error("bracket endpoints do not straddle the threshold: {0}")]
    BracketError(String),
    #[error("radius below the numerical resolution floor: {0}")]
    ResolutionFloor(String),
    #[error("boundary margin violated: {0}")]
    MarginViolated(String),
    #[error("net degenerate: {0}")]
    DegenerateNet(String),
    #[error("degenerate (flat) unit ball")]
    DegenerateBall,
    #[error("recovered model is not a norm: {0}")]
    NotRegular(String),
    #[error("map not surjective onto the target net: {0}")]
    NotSurjective(String),
    #[error("contraction ratio not monotone: {0}")]
    MonotonicityViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
