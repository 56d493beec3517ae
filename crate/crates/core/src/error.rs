use thiserror::Error;

use crate::linalg::SolverError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid problem data: {0}")]
    InvalidProblem(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point ({x}, {y}) lies outside triangle {triangle}")]
    PointOutsideTriangle { triangle: usize, x: f64, y: f64 },
    #[error("problem has no exact solution attached")]
    MissingExactSolution,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("unsupported quadrature degree {0}")]
    UnsupportedDegree(usize),
}
