//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Instance or circuit dimensions that the caller got wrong.
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// Variable count beyond what the dense simulator is willing to allocate.
    #[error("instance has {n_vars} variables, dense simulation is capped at {max}")]
    ResourceLimit { n_vars: usize, max: usize },

    /// Malformed DIMACS input.
    #[error("DIMACS parse error at line {line}: {msg}")]
    DimacsParse { line: usize, msg: String },

    /// Clause width differs from the declared K while strict-K mode is on.
    #[error("clause {clause} has width {width}, expected K = {k} (strict-K mode)")]
    ClauseWidth { clause: usize, width: usize, k: usize },

    /// Argument outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Logistic-map input outside the unit interval.
    #[error("logistic map input {x} lies outside [0, 1]")]
    MapDomain { x: f64 },

    /// Orbit collapsed onto an exact fixed point or the absorbing endpoint.
    #[error("logistic orbit starting at {x0} collapsed to a degenerate point after {step} steps")]
    DegenerateOrbit { x0: f64, step: usize },

    /// SPSA calibration saw an all-zero gradient estimate.
    #[error("SPSA calibration failed: all components of the initial gradient estimate are zero")]
    CalibrationZeroGradient,

    /// Objective evaluation failed during optimization.
    #[error("objective evaluation failed at iteration {iteration}: {source}")]
    ObjectiveFailure {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    /// Landscape with c_max = c_min has no defined mixing metric or AR.
    #[error("undefined metric: instance has c_max = c_min = {value}")]
    UndefinedMetric { value: u32 },

    /// Comparison grids do not align.
    #[error("comparison grids do not align; missing cells: {}", missing.join(", "))]
    GridMismatch { missing: Vec<String> },

    /// Derived per-cell seeds collided, which would correlate streams.
    #[error("derived seed collision between cells {a} and {b}")]
    SeedCollision { a: String, b: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
