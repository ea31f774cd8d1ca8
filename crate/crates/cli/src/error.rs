use std::fmt;

use ucp_core::UcpError;

pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CERTIFICATE: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    /// A core error attributed to the flag whose value caused it.
    pub fn from_flag(flag: &str, e: UcpError) -> Self {
        let mut err = CliError::from(e);
        err.message = format!("--{flag}: {}", err.message);
        err
    }
}

impl From<UcpError> for CliError {
    fn from(e: UcpError) -> Self {
        let code = match e {
            UcpError::PrecisionLoss(_) | UcpError::WindowTooSmall(_) => EXIT_NUMERICAL,
            UcpError::UnboundedCertificate(_) => EXIT_CERTIFICATE,
            _ => EXIT_INVALID,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Attributes a core error to a flag.
pub trait FlagContext<T> {
    fn flag(self, name: &str) -> Result<T, CliError>;
}

impl<T> FlagContext<T> for Result<T, UcpError> {
    fn flag(self, name: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::from_flag(name, e))
    }
}
