use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The geometric helper has a removable or true singularity at the argument.
    #[error("singular point: {0}")]
    Singular(String),

    #[error("target at planar distance {distance:.6} m is unreachable; closest reachable distance is {closest:.6} m")]
    Unreachable { distance: f64, closest: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("empty grid")]
    EmptyGrid,

    #[error("duplicate key in {config} grid: speed {speed} r/min, pressure {pressure} MPa")]
    DuplicateKey {
        config: String,
        speed: f64,
        pressure: f64,
    },

    #[error(
        "no matching sample for speed {speed} r/min, pressure {pressure} MPa in {config} grid"
    )]
    MissingKey {
        config: String,
        speed: f64,
        pressure: f64,
    },

    #[error("disjoint domains: {0}")]
    DisjointDomains(String),

    /// Malformed input table; `line` is 1-based and counts the header.
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
