use std::path::PathBuf;

use crate::ep::EPState;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("multiplier is not finite at wavenumber k = {k}")]
    NonFiniteMultiplier { k: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("near-resonant configuration: margin `{label}` = {value:e}")]
    NearResonance { label: String, value: f64 },

    #[error("Poisson iteration did not converge after {iterations} iterations (defect {defect:e})")]
    PoissonNotConverged { iterations: usize, defect: f64 },

    #[error("Poisson iteration diverged at iteration {iteration} (defect {defect:e})")]
    PoissonDiverged { iteration: usize, defect: f64 },

    #[error("vacuum guard violated: min(1 + rho) = {min_density:e}")]
    Vacuum { min_density: f64 },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    Cfl { dt: f64, bound: f64 },

    #[error("non-finite value detected at t = {t}")]
    NonFinite { t: f64 },

    #[error("run aborted at t = {t}: {reason}")]
    Aborted {
        t: f64,
        reason: Box<Error>,
        last_good: Box<EPState>,
    },

    #[error("clock mismatch: {0}")]
    ClockMismatch(String),

    #[error("grid too large for dense evaluation: N = {n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("singular kernel denominator at (k, km, m) = ({k}, {km}, {m})")]
    SingularKernel { k: f64, km: f64, m: f64 },

    #[error("fit needs at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
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
