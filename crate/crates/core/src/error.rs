use thiserror::Error;

/// Errors produced by the geometric operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// Coordinates fall outside the (strict interior of the) chart domain.
    #[error("coordinate {index} = {value} outside the {chart} domain")]
    DomainError {
        chart: &'static str,
        index: usize,
        value: f64,
    },
    /// Vectors based at different points were combined.
    #[error("tangent vectors are based at different points")]
    BasePointMismatch,
    /// A direction vector is (numerically) zero.
    #[error("degenerate (near-zero) vector")]
    DegenerateVector,
    /// A linear system has no unique solution.
    #[error("singular linear system")]
    SingularSystem,
    /// Newton iteration failed to reach the residual tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },
    /// The Jacobian is numerically singular.
    #[error("singular Jacobian")]
    SingularJacobian,
    /// No sign change was found when bracketing an intersection.
    #[error("no intersection found in the search window")]
    EmptyIntersection,
    /// Quadratic leading coefficient vanishes and no linear root exists.
    #[error("degenerate quadratic equation")]
    DegenerateQuadratic,
    /// Both quadratic roots coincide with the known point q.
    #[error("both quadratic roots coincide with q")]
    BothRootsAtQ,
    /// Vector or matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A generator specification is malformed.
    #[error("invalid generator specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
