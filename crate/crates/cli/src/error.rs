use betamatch::dynamics::DynamicsError;
use betamatch::multinacci::MultinacciError;
use betamatch::paramsweep::SweepError;
use betamatch::quadratic::QuadraticError;
use betamatch::stats::StatsError;
use betamatch::FieldError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("no field file or bundled field named {0:?}")]
    FieldNotFound(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{0} of the checks failed")]
    VerificationFailed(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Quadratic(#[from] QuadraticError),
    #[error(transparent)]
    Multinacci(#[from] MultinacciError),
}

fn precondition(e: &DynamicsError) -> bool {
    !matches!(e, DynamicsError::ZeroMass)
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::FieldNotFound(_) => "FieldNotFound",
            CliError::Io { .. } => "Io",
            CliError::VerificationFailed(_) => "VerificationFailed",
            CliError::Field(e) => e.name(),
            CliError::Dynamics(e) => e.name(),
            CliError::Sweep(e) => e.name(),
            CliError::Stats(e) => e.name(),
            CliError::Quadratic(e) => e.name(),
            CliError::Multinacci(e) => e.name(),
        }
    }

    /// 2 for bad invocations and violated preconditions, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        let usage = match self {
            CliError::Usage(_) | CliError::FieldNotFound(_) => true,
            CliError::Field(e) => matches!(e, FieldError::Parse(_)),
            CliError::Dynamics(e) => precondition(e),
            CliError::Multinacci(MultinacciError::Dynamics(e)) => precondition(e),
            CliError::Sweep(e) => !matches!(e, SweepError::PieceBudgetExceeded(_)),
            CliError::Quadratic(e) => matches!(e, QuadraticError::PointOutOfRange(_)),
            _ => false,
        };
        if usage {
            2
        } else {
            1
        }
    }
}
