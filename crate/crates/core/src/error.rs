use thiserror::Error;

/// Errors raised by the library. CLI and FFI layers map these onto exit
/// codes and C error codes respectively.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("atom {atom} is not balanced: sum of 2*p_i = {total} (expected 1)")]
    Balance { atom: usize, total: f64 },

    #[error("law is degenerate: axis {axis} never has positive weight")]
    DegenerateLaw { axis: usize },

    #[error("atom probabilities sum to {total}, expected 1")]
    Probability { total: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("walk or support left the environment box at {site:?}")]
    BoxEscape { site: Vec<i64> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("solver failed: residual {residual:e} after {iterations} iterations ({message})")]
    Solver {
        residual: f64,
        iterations: usize,
        message: String,
    },

    #[error("polynomial is not Sigma-harmonic: max trace coefficient {max_coefficient:e}")]
    NotSigmaHarmonic { max_coefficient: f64 },

    #[error("walk-on-spheres did not reach the boundary shell within {steps} steps")]
    WosTimeout { steps: usize },

    #[error("insufficient samples: {0}")]
    SampleSize(String),

    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
