use crate::fiber::FiberProfile;
use crate::solver::HistoryEntry;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: expected {expected} samples, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("gaussian width {sigma} is not resolved: {reason}")]
    Resolution { sigma: f64, reason: String },

    #[error("degenerate field: {0}")]
    DegenerateField(&'static str),

    #[error("unsupported exponent p = {p}: {reason}")]
    UnsupportedExponent { p: f64, reason: &'static str },

    #[error("fiber derivative has no sign change on the scan window [{t_min}, {t_max}]")]
    FiberRootNotFound {
        t_min: f64,
        t_max: f64,
        profile: Box<FiberProfile>,
    },

    #[error("descent diverged at iteration {iteration}: non-finite energy")]
    Divergence {
        iteration: usize,
        history: Vec<HistoryEntry>,
    },

    #[error(
        "bad bracket [{c_lo}, {c_hi}]: gamma estimates {gamma_lo:e} and {gamma_hi:e} \
         do not straddle -{neg_tol:e}"
    )]
    BadBracket {
        c_lo: f64,
        c_hi: f64,
        gamma_lo: f64,
        gamma_hi: f64,
        neg_tol: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical problem itself, as opposed to bad
    /// input or configuration.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::FiberRootNotFound { .. } | Error::Divergence { .. } | Error::BadBracket { .. }
        )
    }
}
