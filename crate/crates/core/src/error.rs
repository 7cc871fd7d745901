use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad grid size, schedule or tolerance.
    #[error("configuration error: {0}")]
    Config(String),

    /// Data violates a sign or positivity hypothesis of the problem.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular mobility: (eps + s)^m with m < 0 evaluated at s + eps = {0}")]
    SingularMobility(f64),

    #[error("non-finite iterate at cell {cell}")]
    NonFiniteIterate { cell: usize },

    #[error("singular tridiagonal system at row {row}")]
    SingularSystem { row: usize },

    /// Newton/pseudo-transient iteration ran out of budget.
    #[error("no convergence at eps = {eps:e} after {iterations} iterations (best residual {best_residual:e})")]
    NonConvergence {
        eps: f64,
        iterations: usize,
        best_residual: f64,
        best_iterate: Vec<f64>,
        residual_history: Vec<f64>,
    },

    /// An oracle was asked for parameters outside its hypotheses.
    #[error("oracle validity error: {0}")]
    Validity(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
