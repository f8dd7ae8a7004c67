use alloc::string::String;

/// Errors produced by the simulation pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violates a precondition (invalid quantum numbers, an
    /// out-of-range index, a vanishing bracket, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A conditioned state came out with zero total amplitude.
    #[error("degenerate state: all conditional amplitudes vanish")]
    DegenerateState,
    /// The Fock-space cutoff is too small for the requested amplitudes.
    #[error("truncation error: cutoff {cutoff} < required {required}")]
    Truncation { required: usize, cutoff: usize },
    /// Malformed input data (key/value files, CSV fields).
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
