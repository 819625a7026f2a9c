//! Error type shared across the toolkit.

use num_complex::Complex64;

/// Errors surfaced by model construction, solvers, quadrature and experiments.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A spike value of exactly 1 is the base population eigenvalue.
    #[error("spike value 1 is the base eigenvalue, not a spike")]
    NotASpike,
    #[error("spike value {0} must be a positive finite real different from 1")]
    InvalidSpike(f64),
    #[error("spike multiplicity must be at least 1 (spike value {0})")]
    ZeroMultiplicity(f64),
    #[error("total spike multiplicity {m} must stay below the dimension p = {p}")]
    TooManySpikes { m: usize, p: usize },
    #[error("duplicate spike value {0}; equal spikes must be entered via multiplicity")]
    DuplicateSpike(f64),
    #[error("dimensions must satisfy p >= 1 and n >= 1 (got p = {p}, n = {n})")]
    BadDimensions { p: usize, n: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular sample covariance: {0}")]
    SingularMatrix(String),
    #[error("companion-transform solver failed at z = {z}: {details}")]
    SolverFailure { z: Complex64, details: String },
    #[error("contour construction failed: {0}")]
    Contour(String),
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),
    #[error("eigensolver failure at rep {rep}: {details}")]
    Eigensolver { rep: u64, details: String },
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for errors caused by invalid user input rather than a numerical
    /// breakdown; the CLI maps these to exit code 2.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::SolverFailure { .. }
                | Error::Contour(_)
                | Error::Quadrature(_)
                | Error::Eigensolver { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
