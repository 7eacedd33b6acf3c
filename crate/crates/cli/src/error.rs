use resq::convex::SolverError;
use resq::measures::MeasureError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cannot write output: {0}")]
    Unwritable(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("invalid combination: {0}")]
    Invalid(String),
    #[error("{0} check(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::VerifyFailed(_) => 1,
            Self::Parse(_) | Self::Unwritable(_) => 2,
            Self::Solver(_) => 3,
            Self::Invalid(_) => 4,
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Solver(_) | MeasureError::Malformed(_) => Self::Solver(e.to_string()),
            other => Self::Invalid(other.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        Self::Solver(e.to_string())
    }
}
