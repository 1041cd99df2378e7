use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Fock dimension {0}: at least 2 levels are required")]
    InvalidDimension(usize),

    #[error("Fock dimension {dim} too small for amplitude |alpha| = {alpha}: need at least {required}")]
    TruncationTooSmall { alpha: f64, dim: usize, required: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate cat basis: alpha = 0 leaves the odd cat state undefined")]
    DegenerateBasis,

    #[error("integrator step size underflow at t = {time:e} s (h = {step:e} s)")]
    StepUnderflow { time: f64, step: f64 },

    #[error("state at t = {time:e} s violates the density-matrix invariants: {detail}")]
    InvariantViolation { time: f64, detail: String },

    #[error("finite-difference derivative unstable: {value_full:e} at step {step:e} vs {value_half:e} at half step")]
    StepInstability { step: f64, value_full: f64, value_half: f64 },

    #[error("observable is insensitive to g at this point (|dO/dg| = {0:e})")]
    InsensitivePoint(f64),

    #[error("degenerate measurement statistics: mean occupation {0} has zero variance")]
    DegenerateStatistics(f64),

    #[error("undefined baseline sensitivity: {0}")]
    UndefinedBaseline(&'static str),

    #[error("non-invertible calibration: {0}")]
    NonInvertible(&'static str),

    #[error(
        "grid search disagrees with the closed-form optimal time: {closed:e} s vs {grid:e} s (grid step {step:e} s)"
    )]
    OptimalTimeMismatch { closed: f64, grid: f64, step: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("missing config field `{0}`")]
    MissingField(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Wrap with a human-readable context string (e.g. the figure being built).
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    /// True for errors caused by configuration or input rather than numerics.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::Config(_)
            | Error::MissingField(_)
            | Error::InvalidParameter { .. }
            | Error::InvalidDimension(_)
            | Error::TruncationTooSmall { .. } => true,
            Error::Context { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}
