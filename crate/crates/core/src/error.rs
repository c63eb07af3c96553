use thiserror::Error;

/// Errors raised by the spectral augmentation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("self loop on node {0}")]
    SelfLoop(usize),

    #[error("negative edge weight {weight} on ({i}, {j})")]
    NegativeWeight { i: usize, j: usize, weight: f64 },

    #[error("node index {index} out of range for n = {n}")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("kernel has an all-zero {axis} at index {index}")]
    ZeroKernelLine { axis: &'static str, index: usize },

    #[error("sinkhorn overflow at iteration {iteration}")]
    SinkhornOverflow { iteration: usize },

    #[error("kernel exponent {0:e} exceeds log-domain capacity")]
    KernelOverflow(f64),

    #[error("contraction ratio {0} is not below 1")]
    ContractionNotBelowOne(f64),

    #[error("training diverged at epoch {0}")]
    Diverged(usize),
}

impl Error {
    /// True for failures that come from the numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::SinkhornOverflow { .. }
                | Error::KernelOverflow(_)
                | Error::ContractionNotBelowOne(_)
                | Error::Diverged(_)
        )
    }

    pub(crate) fn shape(expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            expected: expected.into(),
            got: got.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
