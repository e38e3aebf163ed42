use crate::fields::Axis;
use crate::lax::calibrate::CalibrationDiagnosis;
use crate::lax::SignConvention;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("axis {0} is not part of this grid")]
    MissingAxis(Axis),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("transport path leaves the grid at step {step}")]
    PathOutOfBounds { step: usize },

    #[error("path endpoints differ: {0:?} vs {1:?}")]
    EndpointMismatch([usize; 3], [usize; 3]),

    #[error("identity {identity} violated: deviation {deviation:e} exceeds {tolerance:e}")]
    IdentityViolation {
        identity: &'static str,
        deviation: f64,
        tolerance: f64,
    },

    #[error("calibration failed: no sign convention passes every oracle check")]
    CalibrationFailure(Box<CalibrationDiagnosis>),

    #[error("calibration ambiguous: {} conventions pass every oracle check", .0.len())]
    CalibrationAmbiguity(Vec<SignConvention>),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
