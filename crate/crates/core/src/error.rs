use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error)]
pub enum UcpError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The discretization cannot support the requested accuracy.
    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("unbounded certificate: {0}")]
    UnboundedCertificate(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, UcpError>;

impl UcpError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        UcpError::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        UcpError::DegenerateInput(msg.into())
    }

    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        UcpError::PrecisionLoss(msg.into())
    }

    /// True for errors caused by the discretization rather than the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            UcpError::PrecisionLoss(_) | UcpError::WindowTooSmall(_)
        )
    }
}
