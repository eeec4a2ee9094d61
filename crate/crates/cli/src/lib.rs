//! Library half of the `tracker` binary: configuration, file formats and
//! the subcommand implementations. The binary itself only parses arguments
//! and maps errors to exit codes.

pub mod commands;
pub mod config;
pub mod io;

use tracker_core::Error;

/// CLI-level error with a stable exit-code mapping:
/// 1 validation, 2 data, 3 solver.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    /// Configuration or usage problem (exit 1).
    #[error("{0}")]
    Invalid(String),
    /// Input data problem outside the core library (exit 2).
    #[error("{0}")]
    Data(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Data(_) => 2,
            CliError::Core(e) => match e {
                Error::Validation(_)
                | Error::Parameter(_)
                | Error::Dimension(_)
                | Error::UnsupportedProblem(_) => 1,
                Error::TooLarge { .. } | Error::Config(_) => 3,
                _ => 2,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_class() {
        assert_eq!(CliError::Invalid("x".into()).exit_code(), 1);
        assert_eq!(CliError::Data("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(Error::Parameter("k".into())).exit_code(), 1);
        assert_eq!(CliError::Core(Error::NoDataForYear(1999)).exit_code(), 2);
        assert_eq!(CliError::Core(Error::Config("temps".into())).exit_code(), 3);
        assert_eq!(
            CliError::Core(Error::TooLarge { n: 30, limit: 25 }).exit_code(),
            3
        );
    }
}
