use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unit vectors need at least 2 coordinates, got {0}")]
    DimensionTooSmall(usize),
    #[error("vector norm {norm} is not within tolerance of 1")]
    NotUnit { norm: f64 },
    #[error("operation requires a non-empty selection of points")]
    EmptySelection,
    #[error("resultant vector vanishes; mean direction is undefined")]
    DegenerateResultant,
    #[error("Bessel series for order {order} at kappa {kappa} did not converge")]
    NonConvergence { order: f64, kappa: f64 },
    #[error("requested {k} clusters from only {n} points")]
    TooFewPoints { k: usize, n: usize },
    #[error("a subcluster is empty")]
    EmptySubcluster,
    #[error("cluster of {size} points is too small to split")]
    TooSmallToSplit { size: usize },
    #[error("split produced undersized subclusters ({0}, {1})")]
    UndersizedSubcluster(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("every row was degenerate after preprocessing")]
    AllRowsDegenerate,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input data or arguments rather than a bug.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::NonConvergence { .. })
    }
}
