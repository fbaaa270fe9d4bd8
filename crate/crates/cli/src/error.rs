use membrane_cavity::Error as CoreError;
use thiserror::Error;

/// Failures mapped onto the process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Input(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Input(_) => "input",
            CliError::NonConvergence(_) => "fit",
            CliError::Numerical(_) => "numerical",
        }
    }

    /// Single line for stderr: `error[<code>:<kind>] <message>`.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error[{}:{}] {}", self.code(), self.kind(), msg)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(_) => CliError::Input(e.to_string()),
            CoreError::FitFailure(_) | CoreError::SingularNormalEquations => {
                CliError::NonConvergence(e.to_string())
            }
            CoreError::Domain(_)
            | CoreError::Quadrature { .. }
            | CoreError::Solver(_)
            | CoreError::PeakSearch(_)
            | CoreError::NonFinite => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(format!("csv: {e}"))
    }
}
