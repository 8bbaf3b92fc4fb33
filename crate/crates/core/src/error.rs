use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed JSON document (robot description, scenario, polytope).
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A model, state, or argument violates a stated invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("frame index {frame} out of range for a chain with {dof} joints")]
    FrameOutOfRange { frame: usize, dof: usize },

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("mass matrix is not positive definite")]
    MassMatrixFactorization,

    #[error("state outside joint limits: {0}")]
    StateOutOfLimits(String),

    #[error("linear program is unbounded; the constraint set does not bound the projection")]
    UnboundedLp,

    #[error("cannot export a polytope of affine dimension {affine_dim} in R^{dim} as OBJ")]
    DegenerateExport { affine_dim: usize, dim: usize },

    #[error("empty interval on axis {axis}: [{lo}, {hi}]")]
    EmptyInterval { axis: usize, lo: f64, hi: f64 },

    #[error("polytope carries no generator torques")]
    MissingWitness,

    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
