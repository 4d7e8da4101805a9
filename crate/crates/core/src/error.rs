use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
    #[error(transparent)]
    Quadrature(#[from] crate::quadrature::QuadratureError),
    #[error(transparent)]
    Solve(#[from] crate::assembly::SolveError),
    #[error("coefficient error: {0}")]
    Coefficient(String),
    #[error("dof count mismatch: {space} function has {got} values, mesh needs {expected}")]
    DofMismatch {
        space: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("missing divergence of the source term (required by {0})")]
    MissingDivergence(&'static str),
    #[error("{0}")]
    Precondition(String),
    #[error("marking error: {0}")]
    Marking(String),
    #[error("too few levels for a rate fit: need at least {needed}, got {got}")]
    TooFewLevels { needed: usize, got: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
