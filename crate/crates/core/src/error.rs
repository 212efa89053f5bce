use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("grid mismatch: {left} vs {right} intervals")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shooting overflowed at lambda = {lambda}; increase the grid size or rescale")]
    Overflow { lambda: Complex64 },

    #[error("Newton iteration for index {index} did not converge; last iterate {last}, |F| = {residual:e}")]
    NoConvergence {
        index: usize,
        last: Complex64,
        residual: f64,
    },

    #[error("eigenvalue {lambda} for index {index} lies closer to a neighbouring square (eigenvalue crossing?)")]
    Misindexed { index: usize, lambda: Complex64 },

    #[error("eigenvalues for indices {first} and {second} coincide ({lambda})")]
    NotSimple {
        first: usize,
        second: usize,
        lambda: Complex64,
    },

    #[error("ambiguous index assignment near {index}^2")]
    Collision { index: usize },

    #[error("bi-orthogonalisation degenerate at index {index}: |<y, y*>| = {value:e}")]
    Degenerate { index: usize, value: f64 },

    #[error("mode {index}: Im(lambda) * t = {growth} exceeds the growth guard")]
    ExplosiveGrowth { index: usize, growth: f64 },

    #[error("{0}")]
    NotApplicable(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    // the cause is part of the message rather than a separate source, so it
    // is printed once whichever way the error is rendered
    #[error("index {index}: {cause}")]
    AtIndex { index: usize, cause: Box<Error> },
}

impl Error {
    pub(crate) fn at(self, index: usize) -> Self {
        match self {
            e @ Error::AtIndex { .. } => e,
            e => Error::AtIndex {
                index,
                cause: Box::new(e),
            },
        }
    }
}
