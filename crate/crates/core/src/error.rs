use thiserror::Error;

/// Errors raised by the numerical modules.
///
/// Configuration problems are reported separately by [`crate::cli::ConfigError`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("wave number must be finite and nonzero, got {0}")]
    ZeroWaveNumber(f64),

    #[error("Green's function kind {kind} is not defined in {dimension}D")]
    InvalidKind { kind: &'static str, dimension: u8 },

    #[error("kernel is singular at zero separation ({0})")]
    Singularity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("linear system is singular or near-singular (pivot-ratio condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("quadrature did not converge: achieved error estimate {estimate:.3e}, requested {requested:.3e}")]
    Quadrature { estimate: f64, requested: f64 },

    #[error("transmission amplitude has a pole: |denominator| = {denominator:.3e}")]
    Pole { denominator: f64 },

    #[error("argument outside the model domain: {0}")]
    Domain(String),

    #[error("coefficient {0} is not specified")]
    MissingCoefficient(&'static str),

    #[error("infeasible parameter bounds: {0}")]
    InfeasibleBounds(String),

    #[error("iteration did not converge after {iterations} steps (last update {last_update:.3e})")]
    NotConverged { iterations: usize, last_update: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
