use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid too coarse for margin: h*R = {step:.3e} exceeds eta/L_V = {limit:.3e}")]
    MarginViolated { step: f64, limit: f64 },

    #[error("negative edge weight {weight:.3e} at cell {cell}; use the Bellman-Ford variant")]
    NegativeWeight { cell: usize, weight: f64 },

    #[error("CFL condition violated: dt = {dt:.3e} > {limit:.3e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("non-finite value encountered in solver at step {step}")]
    NonFinite { step: usize },

    #[error("bisection bracket failure: level {level} still admits a negative cycle")]
    Bracket { level: f64 },

    #[error("k-sequence not monotone: H_{k}(P) = {value} exceeds previous {previous} beyond {tol}")]
    NonMonotone {
        k: u32,
        value: f64,
        previous: f64,
        tol: f64,
    },

    #[error("no invariant set present: {0}")]
    NoInvariantSet(String),

    #[error("trajectory step rejected at t = {t}: velocity not in F(x)")]
    StepRejected { t: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Cfl { .. }
                | Error::NonFinite { .. }
                | Error::Bracket { .. }
                | Error::NonMonotone { .. }
                | Error::StepRejected { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
