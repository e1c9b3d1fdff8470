use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("configuration parse error at line {line}, column {column}: {message}")]
    ConfigParse { line: usize, column: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("radius {r} is outside the tabulated profile range [0, {r_max}]")]
    OutOfRange { r: f64, r_max: f64 },

    #[error("mu_rad has no zero: {0}")]
    NoRoot(String),

    #[error("field grid {found} does not match configuration grid {expected}")]
    GridMismatch { expected: String, found: String },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("window [{lo}, {hi}] is outside the profile domain [{s_min}, {s_max}]")]
    WindowOutsideDomain {
        lo: f64,
        hi: f64,
        s_min: f64,
        s_max: f64,
    },

    #[error("gradient flow diverged after {steps} steps: max |u| = {max_abs} exceeds {bound}")]
    Divergence {
        steps: usize,
        max_abs: f64,
        bound: f64,
    },

    #[error(
        "no initial state converged; best candidate '{}' stopped at residual {:e} after {} steps",
        best.initializer_label, best.residual, best.steps_taken
    )]
    NotConverged { best: Box<crate::solver::SolveResult> },

    #[error("Newton iteration did not converge after {iterations} iterations (last update {last_update:e})")]
    NewtonFailure { iterations: usize, last_update: f64 },

    #[error("continuation in alpha failed; last good alpha = {last_good}")]
    ContinuationFailure { last_good: f64 },

    #[error("point ({x1}, {x2}) is outside the admissible region: {reason}")]
    OutsideRegion { x1: f64, x2: f64, reason: String },

    #[error("empty feasible set: {0}")]
    EmptySet(String),

    #[error("no prediction exists for the indeterminate regime")]
    NoPrediction,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("argument {s} is outside the validated range [-20, 20]")]
    AiryRange { s: f64 },

    #[error("sampling point ({x1}, {x2}) leaves the grid")]
    SampleOutsideGrid { x1: f64, x2: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
