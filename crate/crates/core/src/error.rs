use thiserror::Error;

/// Errors raised by the rapshare library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {func}: {reason}")]
    Domain { func: &'static str, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (partial estimate {estimate:e}, error bound {error:e})"
    )]
    Quadrature {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error(
        "could not bracket the Lagrange multiplier: achievable average interference \
         spans [{min_interference:e}, {max_interference:e}] but the target is {target:e}"
    )]
    NonBracketing {
        min_interference: f64,
        max_interference: f64,
        target: f64,
    },

    #[error("load system is singular or ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("steering matrix is rank deficient at element {element} (residual norm {norm:e})")]
    RankDeficient { element: usize, norm: f64 },

    #[error("MRC combiner undefined: every specular component is zero")]
    ZeroSpecular,

    #[error("too few samples for an asymptotic KS p-value: need at least 100, got {0}")]
    TooFewSamples(usize),

    #[error("unsupported scenario for quadrature: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        func,
        reason: reason.into(),
    }
}
