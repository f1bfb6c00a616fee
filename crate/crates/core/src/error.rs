use std::path::PathBuf;

/// Errors produced by the simulator, the study harness and file output.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("a mesh needs at least 2 elements, got {0}")]
    InvalidMesh(usize),

    #[error("size mismatch: expected {expected} values, found {found}")]
    MeshMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular tridiagonal system (zero pivot at row {row})")]
    SingularSystem { row: usize },

    #[error(
        "Newton iteration diverged at step {step}: residual {residual:.3e} after {iterations} iterations"
    )]
    NewtonDivergence {
        step: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("decay fit needs at least {needed} samples in the window, got {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("decay fit requires positive values, found {value} at t = {t}")]
    NonPositiveValues { t: f64, value: f64 },

    #[error("mesh {coarse} is not nested in reference mesh {reference} by a power of two")]
    NonNestedMeshes { coarse: usize, reference: usize },

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::MeshMismatch { expected, found })
    }
}
