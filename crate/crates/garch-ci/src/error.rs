use thiserror::Error;

/// Errors shared across the simulation, inference and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Second-moment stationarity a1 + b1 < 1 is violated.
    #[error("non-stationary parameters: a1 + b1 = {sum} >= 1")]
    NonStationary { sum: f64 },

    /// Fourth-moment condition rho^2 = E(a1 xi^2 + b1)^2 < 1 is violated, so
    /// the long-run variance has no closed form.
    #[error("fourth-moment condition violated: rho^2 = {rho2} >= 1")]
    MomentCondition { rho2: f64 },

    /// The a1 = b1 = 0 corner where the log-moment condition is undefined.
    #[error("degenerate parameters a1 = b1 = 0: log-moment condition undefined")]
    DegenerateGarch,

    /// Every resampling batch failed the |1 - mean| gate.
    #[error("stable batch mean gate not met after {attempts} attempts (tol {tol})")]
    AttemptsExhausted { attempts: u32, tol: f64 },

    #[error("sequence too short: need more than {needed} values, got {got}")]
    InsufficientLength { needed: usize, got: usize },

    #[error("length mismatch: path has {path_len} values, weights have {weights_len}")]
    LengthMismatch { path_len: usize, weights_len: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
