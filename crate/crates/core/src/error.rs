use thiserror::Error;

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numerical,
    NotFound,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain specification: {0}")]
    InvalidSpec(String),

    #[error("chain of {n_sites} sites exceeds the limit of {max} sites; reduce n_sites (memory grows as 2^n_sites)")]
    TooLarge { n_sites: usize, max: usize },

    #[error("site index out of range: ({i}, {j}) for a chain of {n_sites} sites")]
    IndexOutOfRange { i: usize, j: usize, n_sites: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("matrix is not positive semidefinite: eigenvalue {0:e} below tolerance")]
    NotPositive(f64),

    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("determinant for r = {r} is out of range ({value:e}); reduce r_max")]
    Determinant { r: usize, value: f64 },

    #[error("operation requires a symmetric state: {0}")]
    SymmetryBroken(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("config error at line {line}: {message}")]
    ConfigLine { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("non-uniform grid: {0}")]
    NonUniformGrid(String),

    #[error("extremum lies on the boundary of the series at h = {0}")]
    ExtremumAtBoundary(f64),

    #[error("degenerate least-squares design: {0}")]
    DegenerateDesign(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidSpec(_)
            | Error::TooLarge { .. }
            | Error::IndexOutOfRange { .. }
            | Error::Unsupported(_)
            | Error::ConfigLine { .. }
            | Error::Config(_)
            | Error::Io(_) => ErrorKind::Config,
            Error::NotFound(_) => ErrorKind::NotFound,
            _ => ErrorKind::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
