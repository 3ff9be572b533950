//! Process exit codes and the error carrying them.

use cnoidal_core::Error;

pub const OK: u8 = 0;
pub const VERIFY_FAILED: u8 = 1;
pub const USAGE: u8 = 2;
pub const NO_SOLUTION: u8 = 3;
pub const NUMERICAL: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: USAGE,
            message: message.into(),
        }
    }

    pub fn usage_from(e: Error) -> Self {
        CliError::usage(e.to_string())
    }

    pub fn io(e: std::io::Error) -> Self {
        CliError {
            code: NUMERICAL,
            message: format!("i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Parse(_) => USAGE,
            Error::DegenerateKdv | Error::NoRealSolution(_) => NO_SOLUTION,
            Error::Unbound(_)
            | Error::CoefficientSingularity(_)
            | Error::Quadrature(..)
            | Error::Unstable { .. }
            | Error::BlowUp(_)
            | Error::NoSignal(_) => NUMERICAL,
        };
        let message = match e {
            Error::NoRealSolution(_) => format!("no real solution of this class: {e}"),
            _ => e.to_string(),
        };
        CliError { code, message }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}
