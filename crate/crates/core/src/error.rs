use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid mesh: {0}")]
    Invalid(String),
    #[error("non-manifold edge ({a}, {b}) shared by {count} triangles")]
    NonManifoldEdge { a: usize, b: usize, count: usize },
}

#[derive(Debug, Error)]
pub enum FemError {
    #[error("polynomial degree {0} is not supported (the method needs k >= 2)")]
    DegreeTooLow(usize),
    #[error("quadrature of exactness {0} is not available (maximum {max})", max = crate::fem::quadrature::MAX_DEGREE)]
    UnsupportedQuadrature(usize),
    #[error("point ({x}, {y}) is outside triangle {triangle}")]
    OutsideTriangle { triangle: usize, x: f64, y: f64 },
    #[error("point ({x}, {y}) is outside the mesh")]
    OutsideMesh { x: f64, y: f64 },
    #[error("coefficient vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Error)]
pub enum BeamError {
    #[error("invalid beam: {0}")]
    Invalid(String),
    #[error("beam endpoint ({x}, {y}) lies outside the mesh")]
    EndpointOutside { x: f64, y: f64 },
    #[error(
        "beam coincides with mesh face {face} over a segment of positive length; \
         intersection points must form a discrete set"
    )]
    Collinear { face: usize },
    #[error("beam leaves the mesh between parameters {from} and {to}")]
    Gap { from: f64, to: f64 },
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular or indefinite system: pivot {pivot:e} at dof {dof}")]
    Singular { dof: usize, pivot: f64 },
    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error(
        "direct solve stalled after {steps} refinement steps at relative residual {residual:e}; \
         the round-off floor of this system is about {floor:e}, raise the tolerance"
    )]
    RefinementStalled { steps: usize, residual: f64, floor: f64 },
    #[error("conjugate gradients broke down at iteration {iteration}: the matrix is not positive definite")]
    Breakdown { iteration: usize },
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Beam(#[from] BeamError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error)]
#[error("invalid specification: {0}")]
pub struct SpecError(pub String);
