use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model, control or schedule parameter is out of range.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// The truncated Hilbert space is larger than the configured cap.
    #[error("Hilbert-space dimension {requested} exceeds the capacity cap {cap}")]
    Capacity { requested: u128, cap: usize },

    /// Two distinct transitions are closer than the working resolution.
    #[error("transitions {first:.9} and {second:.9} are not resolvable (resolution {resolution:e})")]
    Unresolvable {
        first: f64,
        second: f64,
        resolution: f64,
    },

    /// More than one distinct line falls inside a resonance window.
    #[error("resonance window of width {window:e} around carrier {carrier:.9} contains distinct lines {lines:?}")]
    Ambiguous {
        carrier: f64,
        window: f64,
        lines: Vec<f64>,
    },

    /// The spectator band of a target transition collides with another line.
    #[error("band [{band_low:.9}, {band_high:.9}] collides with line {line:.9} (required clearance {clearance:e})")]
    BandCollision {
        band_low: f64,
        band_high: f64,
        line: f64,
        clearance: f64,
    },

    /// A gate cannot be realized on this model.
    #[error("unsupported gate {gate}: {reason}")]
    UnsupportedGate { gate: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("time {t} lies outside the schedule [0, {duration}]")]
    OutsideSchedule { t: f64, duration: f64 },

    /// The adaptive integrator could not meet the tolerance.
    #[error("step size underflow at t = {t} (step {step:e})")]
    StepUnderflow { t: f64, step: f64 },

    #[error("non-finite amplitude encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
