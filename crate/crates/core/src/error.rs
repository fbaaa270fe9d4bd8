use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A domain type was constructed with values that break its invariants.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature hit its subdivision budget before meeting the
    /// requested tolerance.
    #[error(
        "quadrature did not converge: estimate {estimate:e}, error estimate {error_estimate:e}"
    )]
    Quadrature { estimate: f64, error_estimate: f64 },

    /// An iterative solver exhausted its iteration budget.
    #[error("solver did not converge: {0}")]
    Solver(String),

    /// A transmission peak or its half-maximum crossings could not be located.
    #[error("peak search failed: {0}")]
    PeakSearch(String),

    /// The normal equations of a least-squares problem are singular.
    #[error("singular normal equations")]
    SingularNormalEquations,

    /// A fit produced a physically meaningless result.
    #[error("fit failed: {0}")]
    FitFailure(String),

    /// A model returned non-finite predictions.
    #[error("model evaluation produced non-finite values")]
    NonFinite,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
