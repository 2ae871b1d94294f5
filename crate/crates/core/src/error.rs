use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("covariance matrix is not symmetric (max asymmetry {0:.3e})")]
    NonSymmetric(f64),
    #[error("covariance matrix has a non-positive diagonal entry at index {0}")]
    NonPositiveDiagonal(usize),
    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("state cannot be brought to standard form by local rotations: {0}")]
    NotLocallyReducible(&'static str),
    #[error("invalid standard form: {0}")]
    InvalidStandardForm(String),
    #[error("symplectic eigenvalues are complex (Delta^2 - 4 I4 = {0:.3e})")]
    ComplexEigenvalue(f64),
    #[error("entropy function argument {0} is below 1/2")]
    Domain(f64),
    #[error("unphysical: d_minus < 1/2 (d_minus = {d_minus:.9})")]
    UnphysicalState { d_minus: f64 },
    #[error("oracle grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("single-mode noise is phase sensitive: |var_x - var_y| = {diff:.4} on mode {mode}")]
    AsymmetricSingleModeNoise { mode: char, diff: f64 },
    #[error("unphysical reconstruction: d_minus = {d_minus:.6} is more than 5 sigma below 1/2 (sigma = {sigma:.3e})")]
    UnphysicalReconstruction { d_minus: f64, sigma: f64 },
    #[error("scan covers {0:.4} rad, need at least one full 2*pi period")]
    InsufficientScanRange(f64),
    #[error("transmission {0} outside [0, 1]")]
    EtaOutOfRange(f64),
    #[error("overlap {0} outside [0, 1]")]
    OverlapOutOfRange(f64),
    #[error("unknown subchannel pair {0}")]
    UnknownPair(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that signal a state violating the uncertainty bound,
    /// as opposed to malformed input.
    pub fn is_unphysical(&self) -> bool {
        matches!(
            self,
            Error::UnphysicalState { .. }
                | Error::UnphysicalReconstruction { .. }
                | Error::ComplexEigenvalue(_)
                | Error::NotPositiveDefinite
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
