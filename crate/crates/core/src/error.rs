use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero divisor: q·q̄ vanishes")]
    ZeroDivisor,
    #[error("structural set is not orthonormal at ({k}, {s}): deviation {deviation:e}")]
    NotOrthonormal { k: usize, s: usize, deviation: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("order out of range: {0}")]
    OrderOutOfRange(String),
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("a quadrature node falls on the singular point")]
    SingularityOnGrid,
    #[error("finite-difference stencil leaves the domain")]
    BoundaryTooClose,
    #[error("kernel evaluated at its singular point")]
    SingularPoint,
    #[error("kernel path passes through the singular point")]
    SingularPath,
    #[error("quantity is undefined on the boundary")]
    UndefinedOnBoundary,
}

pub type Result<T> = std::result::Result<T, Error>;
