use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("rank deficient: {0}")]
    Rank(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    /// The constraint set of a quadratic program admits no point.
    #[error("infeasible problem: {0}")]
    Infeasible(String),

    /// Hamiltonian eigenvalues on (or too close to) the imaginary axis.
    #[error("spectral error: {0}")]
    Spectral(String),

    #[error("invariant subspace error: {0}")]
    Subspace(String),

    #[error("uncontrollable pair: {0}")]
    Uncontrollable(String),

    #[error("integration blew up at t = {t}: state {state:?}")]
    BlowUp { t: f64, state: Vec<f64> },
}
