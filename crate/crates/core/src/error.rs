use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "no normalisable solution: eta* = {eta} is not below the critical inelasticity {critical}"
    )]
    AboveCritical { eta: f64, critical: f64 },

    /// Invalid parameters or a malformed input profile.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("accuracy target missed: best estimate {estimate} with error estimate {error:e}")]
    Accuracy { estimate: Complex64, error: f64 },

    #[error("solver failed: {message}")]
    Solver {
        message: String,
        trace: Vec<Complex64>,
    },

    /// A root was found on the wrong sheet of `kappa = sqrt(-2E)`.
    #[error("branch error: {0}")]
    Branch(String),

    #[error("step size underflow at R = {radius:e} (step {step:e})")]
    Stiffness { radius: f64, step: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("state n = {n} failed: {source}")]
    State {
        n: i64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors caused by the caller's inputs rather than by a numerical failure.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::Domain(_) | Error::AboveCritical { .. } => true,
            Error::State { source, .. } => source.is_domain(),
            _ => false,
        }
    }
}
