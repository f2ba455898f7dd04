//! Failure classes and their exit codes.

use std::process::ExitCode;

use floquet_core::floquet::FloquetError;
use floquet_core::systems::SystemsError;
use thiserror::Error;

use crate::sysfile::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input, invalid parameters.
    #[error("{0}")]
    Config(String),
    /// A hypothesis, verification or numerical check did not pass.
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Config(_) => ExitCode::from(1),
            Self::Check(_) => ExitCode::from(2),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        if e.line == 0 {
            Self::Config(e.message)
        } else {
            Self::Config(e.to_string())
        }
    }
}

impl From<FloquetError> for CliError {
    fn from(e: FloquetError) -> Self {
        match e {
            FloquetError::DimensionMismatch(_) | FloquetError::Expr(_) => {
                Self::Config(e.to_string())
            }
            _ => Self::Check(e.to_string()),
        }
    }
}

impl From<SystemsError> for CliError {
    fn from(e: SystemsError) -> Self {
        match e {
            SystemsError::Floquet(inner) => inner.into(),
            SystemsError::InvalidParameters(_)
            | SystemsError::UnknownBuiltin(_)
            | SystemsError::UnknownParameter { .. }
            | SystemsError::Expr(_) => Self::Config(e.to_string()),
            SystemsError::StructureViolation { .. }
            | SystemsError::Specfun(_)
            | SystemsError::Ode(_) => Self::Check(e.to_string()),
        }
    }
}
