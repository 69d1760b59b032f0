use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: self-contact of node {node}")]
    SelfContact { line: usize, node: String },

    #[error("no contact events to work with")]
    NoEvents,

    #[error("timestamp {t} is off the {delta_t} s grid anchored at {t_start}")]
    GridMismatch { t: u64, delta_t: u64, t_start: u64 },

    #[error("invalid window length {w} for {n} snapshots (need 1 <= w <= n)")]
    InvalidWindow { w: usize, n: usize },

    #[error("connection series must be nonempty")]
    EmptySeries,

    #[error("need at least 2 windows, got {0}")]
    InsufficientWindows(usize),

    #[error("invalid similarity matrix: {0}")]
    InvalidMatrix(String),

    #[error("resolution must be positive, got {0}")]
    InvalidResolution(f64),

    #[error("invalid resolution scan: from {from} to {to} step {step} (need from > to > 0, step > 0)")]
    InvalidScanRange { from: f64, to: f64, step: f64 },

    #[error("invalid cluster count {k}: expected 2 <= k <= {max}")]
    InvalidClusterCount { k: usize, max: usize },

    #[error("Dunn index undefined: every cluster is a singleton")]
    UndefinedDiameter,

    #[error("Dunn index undefined: fewer than 2 clusters")]
    SingleCluster,

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("label sequences differ in length: {0} vs {1}")]
    LabelLengthMismatch(usize, usize),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
