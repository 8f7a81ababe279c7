use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image is {width}x{height}, minimum is {min}x{min}")]
    ImageTooSmall { width: usize, height: usize, min: usize },

    #[error("pyramid of {requested} levels requested, at most {max} are feasible")]
    PyramidTooDeep { requested: usize, max: usize },

    #[error("invalid pyramid levels: center {center}, surround {surround}, pyramid has {levels}")]
    InvalidLevels {
        center: usize,
        surround: usize,
        levels: usize,
    },

    #[error("orientation list is empty")]
    EmptyOrientations,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("row {row} of transition matrix sums to {sum}")]
    NotStochastic { row: usize, sum: f64 },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("unknown query `{0}`")]
    UnknownQuery(String),

    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("cannot inject outlier: {0}")]
    InjectionConflict(String),

    #[error("gaze samples not sorted by time at index {0}")]
    UnsortedSamples(usize),

    #[error("duplicate gaze timestamp at index {0}")]
    DuplicateTimestamp(usize),

    #[error("AOIs {0} and {1} overlap")]
    OverlappingAois(String, String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}
