use thiserror::Error;

/// Failures reported by the numerical routines and the Monte Carlo engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },
    #[error("{what}: cancellation lost {lost_bits:.0} of {available_bits} bits")]
    PrecisionLoss {
        what: &'static str,
        lost_bits: f64,
        available_bits: u32,
    },
    #[error("{0} vanishes at the evaluation point")]
    PoleError(&'static str),
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("Laplace inversion unstable: {0}")]
    InversionUnstable(String),
    #[error("{absorbed} of {total} paths were absorbed before the horizon")]
    HorizonExceeded { absorbed: usize, total: usize },
    #[error("rejection budget exceeded after {attempts} attempts ({accepted} accepted)")]
    RejectionBudgetExceeded { attempts: u64, accepted: usize },
    #[error("effective sample size {ess:.1} is below {min}")]
    DegenerateWeights { ess: f64, min: f64 },
    #[error("not enough tail observations: {0}")]
    InsufficientTail(String),
}

impl Error {
    /// Module of origin, used by the CLI when reporting numerical failures.
    pub fn origin(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "input",
            Error::NonConvergence { what, .. } | Error::PrecisionLoss { what, .. } => what,
            Error::PoleError(_) => "transforms",
            Error::QuadratureFailure(_) => "quadrature",
            Error::InversionUnstable(_) => "inversion",
            Error::HorizonExceeded { .. }
            | Error::RejectionBudgetExceeded { .. }
            | Error::DegenerateWeights { .. }
            | Error::InsufficientTail(_) => "simulate",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
