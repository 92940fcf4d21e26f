//! Exit-code classification: 0 success, 1 runtime/validation failure,
//! 2 usage error.

use std::fmt;

/// Marker wrapped into `anyhow` chains for bad invocations (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(message.into()))
}

/// Whether an error chain denotes a usage problem. Core parameter
/// validation counts: those errors fire before any computation starts.
pub fn is_usage(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        cause.is::<UsageError>()
            || matches!(
                cause.downcast_ref::<hamvol_core::Error>(),
                Some(hamvol_core::Error::InvalidParameter { .. })
            )
    })
}
