use thiserror::Error;

/// Errors raised by the dimension-theoretic computations.
///
/// Every variant maps onto a machine-readable [`Error::reason`] string so
/// front ends can report failures without parsing the display text.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("enumeration of {requested} words exceeds the budget of {budget}")]
    Budget { requested: u128, budget: u128 },

    #[error("index {index} out of range (available: {available})")]
    Index { index: usize, available: usize },

    #[error("matrix is numerically singular (smallest singular value {smallest:e})")]
    Singular { smallest: f64 },

    #[error("exterior degree {k} out of range [{min}, {max}]")]
    Degree { k: usize, min: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("iteration did not converge after {iterations} steps: {what}")]
    Convergence { iterations: usize, what: String },

    #[error("eigenvalue solver failed to converge")]
    EigenSolver,

    #[error("certificate problem: {0}")]
    Certificate(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid input in `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("schedule infeasible: {0}")]
    Schedule(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Short stable identifier of the failure class.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::Budget { .. } => "budget_exceeded",
            Error::Index { .. } => "index_out_of_range",
            Error::Singular { .. } => "singular_matrix",
            Error::Degree { .. } => "degree_out_of_range",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Convergence { .. } => "no_convergence",
            Error::EigenSolver => "eigen_solver_failure",
            Error::Certificate(_) => "certificate",
            Error::Hypothesis(_) => "hypothesis_violation",
            Error::Validation { .. } => "validation",
            Error::Schedule(_) => "schedule_infeasible",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
