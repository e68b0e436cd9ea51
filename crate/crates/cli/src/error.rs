use std::fmt;

use marginrcn::Error;

/// Any invariant checked by `verify` failed.
pub const EXIT_VERIFY_FAILED: i32 = 1;
/// Bad flags, bad values, bad config.
pub const EXIT_USAGE: i32 = 2;
/// Data generation or learning could not complete.
pub const EXIT_FAILURE: i32 = 3;
/// An input file has the wrong format.
pub const EXIT_FORMAT: i32 = 4;
/// An exact-enumeration budget was exceeded without `--approx`.
pub const EXIT_BUDGET: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self::new(EXIT_FAILURE, message)
    }

    pub fn format(message: impl Into<String>) -> Self {
        Self::new(EXIT_FORMAT, message)
    }

    pub fn with_hint(mut self, hint: &str) -> Self {
        self.message = format!("{}; {hint}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::OutOfRange { name, .. } => {
                return CliError::usage(format!("invalid value for --{}: {e}", name.replace('_', "-")));
            }
            Error::NonFinite(_) | Error::DimensionMismatch { .. } | Error::Empty(_) | Error::NotUnit { .. } => EXIT_USAGE,
            Error::RejectionBudget { .. } | Error::FamilyBudget { .. } | Error::Io(_) => EXIT_FAILURE,
            Error::Parse { .. } => EXIT_FORMAT,
            Error::ExactBudget { .. } => EXIT_BUDGET,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::failure(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::failure(format!("json: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
