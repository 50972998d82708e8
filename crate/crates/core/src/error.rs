use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("word reduces to the identity (null-homotopic)")]
    NullHomotopic,
    #[error("inessential arc: {0}")]
    Inessential(String),
    #[error("peripheral class not allowed here: {0}")]
    Peripheral(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("pair of pants excluded")]
    PairOfPants,
    #[error("arc-arc intersection numbers are not supported")]
    ArcArcPairing,
    #[error("invalid coordinates: {0}")]
    InvalidCoordinates(String),
    #[error("coercivity bound unavailable: {0}")]
    CoercivityUnavailable(String),
    #[error("functional is not positive on {0}")]
    NonPositiveFunctional(String),
    #[error("unsaturated search: {0}")]
    Unsaturated(String),
    #[error("multicurve {0:?} is not in the filling registry")]
    NotFilling(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("no interior images at this bound")]
    NoInteriorImages,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for "did not converge" outcomes, as opposed to invalid input.
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Error::Unsaturated(_) | Error::Inconclusive(_))
    }
}
