use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("failed to load domain description: {0}")]
    Load(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("point {x}+{y}i lies outside the fundamental domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("trace {0} is not hyperbolic (need > 2)")]
    NotHyperbolic(f64),

    #[error("weight 2k with k = {0} is not supported here")]
    UnsupportedWeight(i64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error estimate {error:e}")]
    Accuracy { estimate: f64, error: f64 },

    #[error("series did not converge after {terms} terms (partial sum {partial:e})")]
    NonConvergence { terms: usize, partial: f64 },

    #[error("independent computations disagree: {left:e} vs {right:e}")]
    Consistency { left: f64, right: f64 },

    #[error("q-expansion truncated at {coefficients} terms is too short at y = {y}")]
    TruncationTooShort { coefficients: usize, y: f64 },

    #[error("verification of the modular group is unsupported for this domain")]
    UnsupportedVerification,

    #[error("{step}: {source}")]
    Step {
        step: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at(step: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Step {
            step,
            source: Box::new(source),
        }
    }

    /// The innermost error, with step labels stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
