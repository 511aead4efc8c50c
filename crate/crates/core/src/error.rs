use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("separation undefined: need at least 2 points, got {0}")]
    SeparationUndefined(usize),

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("duplicate point ({x}, {y}) at index {index}")]
    DuplicatePoint { index: usize, x: f64, y: f64 },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid region [{xmin}, {xmax}] x [{ymin}, {ymax}]")]
    InvalidRegion {
        xmin: f64,
        xmax: f64,
        ymin: f64,
        ymax: f64,
    },

    #[error("invalid radii list: {0}")]
    InvalidRadii(&'static str),

    #[error("window too small for r_max = {r_max}: sweep region padded by r_max is not inside the populated window")]
    WindowTooSmall { r_max: f64 },

    #[error("not a packing: separation {separation} < 2 * r0 = {}", 2.0 * r0)]
    NotAPacking { separation: f64, r0: f64 },

    #[error("not a covering: covering radius {radius} exceeds r0 = {r0} (deepest point ({x}, {y}))")]
    NotACovering { radius: f64, r0: f64, x: f64, y: f64 },

    #[error("kernel overflow: exponent real part {0} exceeds the f64 range")]
    KernelOverflow(f64),

    #[error("beneath-threshold configuration: interpolation ill-posed (lambda_min = {lambda_min:e})")]
    IllPosed { lambda_min: f64 },

    #[error("eigen-iteration did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("matrix is not Hermitian (entry ({row}, {col}) mismatch {mismatch:e})")]
    NotHermitian {
        row: usize,
        col: usize,
        mismatch: f64,
    },

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("perturbation produced coincident points after {0} attempts")]
    PerturbCollision(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported point file extension: {0}")]
    UnsupportedFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}
