//! Error type shared across the crate.

/// Errors surfaced by network construction, the solver, and the oracle.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration or arguments (bad dimensions, empty inputs, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A serving cluster carries essentially no signal for its user, so the
    /// interference normalization is undefined. Never silently regularized.
    #[error("degenerate channel for user {user}: |h^H D h| = {value:e} is below 1e-30")]
    DegenerateChannel { user: usize, value: f64 },

    /// The fixed-point iteration hit its iteration budget. Carries the full
    /// residual history for diagnosis.
    #[error("power iteration did not reach the requested tolerance within {iterations} iterations (last residual {last:e})", last = residual_trace.last().copied().unwrap_or(f64::NAN))]
    NonConvergence {
        iterations: usize,
        residual_trace: Vec<f64>,
    },

    /// Spectral-radius power iteration hit its iteration cap.
    #[error("spectral radius estimate did not converge within {limit} iterations")]
    IterationCap { limit: usize },

    /// The association space is larger than the enumeration budget.
    #[error("{required} cluster associations exceed the enumeration budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    /// A numerical step failed (non-PSD covariance, singular solve, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
