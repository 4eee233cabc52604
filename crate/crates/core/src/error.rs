use thiserror::Error;

/// Errors produced by the quantizer constructions, solvers and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("{what} did not converge (best residual {residual:.3e})")]
    NonConvergence { what: String, residual: f64 },

    #[error("region has zero mass ({mass:.3e})")]
    ZeroMass { mass: f64 },

    #[error("Voronoi cells kept collapsing in all {restarts} restarts")]
    DegenerateCell { restarts: usize },

    #[error("no admissible real solution: {0}")]
    NoRealSolution(String),

    #[error("structural check failed: {0}")]
    Assertion(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArg(msg.into()))
}
