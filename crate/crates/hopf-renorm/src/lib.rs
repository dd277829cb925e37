//! File formats, command implementations and exit-code policy for the
//! `hopf-renorm` command-line tool. The numerical work lives in
//! [`hopf_renorm_core`].

pub mod commands;
pub mod io;
pub mod render;

use std::fmt;

use hopf_renorm_core::Error;

pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Error carrying the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError { code: EXIT_NUMERICAL, message: message.into() }
    }

    /// Prefix the message with a generator label unless it already names it.
    pub fn labelled(self, label: &str) -> Self {
        if self.message.contains(label) {
            self
        } else {
            CliError { message: format!("{label}: {}", self.message), ..self }
        }
    }
}

/// Exit code for a core error: bounds and capabilities give 2, tolerance
/// and stability failures 1, bad input 64.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        e if e.is_resource() => EXIT_RESOURCE,
        Error::Capability(_) => EXIT_RESOURCE,
        e if e.is_numerical() => EXIT_NUMERICAL,
        Error::InvalidGraph(_) | Error::Domain(_) | Error::UnknownGenerator(_) | Error::WeightMismatch { .. } => {
            EXIT_USAGE
        }
        _ => EXIT_NUMERICAL,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { code: exit_code(&e), message: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}
