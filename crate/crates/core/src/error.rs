use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh level {level} outside supported range 1..={cap}")]
    InvalidLevel { level: usize, cap: usize },

    #[error("triangle index {index} out of bounds ({len} triangles)")]
    TriangleIndex { index: usize, len: usize },

    #[error("polynomial degree {degree} not supported (expected {min}..={max})")]
    UnsupportedDegree { degree: usize, min: usize, max: usize },

    #[error("quadrature degree {0} not supported (maximum 30)")]
    UnsupportedQuadrature(usize),

    #[error("harmonic enrichment degree {degree} must exceed the polynomial degree {k}")]
    HarmonicDegree { degree: usize, k: usize },

    #[error("local matrix is singular or indefinite: {0}")]
    SingularLocal(String),

    #[error("inconsistent degree-of-freedom map: {0}")]
    DofMap(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("conjugate gradients did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
