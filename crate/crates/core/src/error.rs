use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pole at {0}")]
    PoleAt(Complex64),
    #[error("within {distance:e} of the pole at {pole}; singular terms cancel numerically")]
    NearPole { pole: Complex64, distance: f64 },
    #[error("series not convergent: {0}")]
    NotConvergent(String),
    #[error("accuracy loss: {0}")]
    AccuracyLoss(String),
    #[error("adaptive step collapsed near t = {t}")]
    StepCollapse { t: f64 },
    #[error("point t = {t} is within {band:e} of a region boundary")]
    BoundaryIndeterminate { t: f64, band: f64 },
    #[error("contour trace diverged: {0}")]
    TraceDiverged(String),
    #[error("contour passes through or too close to a zero near {0}")]
    ContourThroughZero(Complex64),
    #[error("ambiguous root near t = {t}: margin {margin:e}")]
    AmbiguousRoot { t: f64, margin: f64 },
    #[error("orphan zero of {function} at t = {t}")]
    OrphanZero { function: String, t: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
