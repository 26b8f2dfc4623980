use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),
    #[error("zero momentum mode has no Bogoliubov transformation")]
    ZeroMomentum,
    #[error("dynamically unstable: {0}")]
    Instability(String),
    #[error("negative mass squared ({0:e}); requires rabi <= 0")]
    NegativeMassSquared(f64),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("integral did not converge: {0}")]
    Convergence(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("Hilbert space too large: {dim} states exceeds {limit}")]
    Dimension { dim: u128, limit: usize },
    #[error("integrator drift {drift:e} exceeds tolerance")]
    StepSize { drift: f64 },
    #[error("empty window: {0}")]
    EmptyWindow(String),
    #[error("bound violated: {0}")]
    BoundViolation(String),
}
