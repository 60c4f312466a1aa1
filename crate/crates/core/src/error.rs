use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("{function}: {detail}")]
    Domain { function: &'static str, detail: String },

    /// A Gamma function argument appearing in a closed form is not in the right half-plane.
    #[error("{context}: Gamma argument {argument} has non-positive real part")]
    GammaArgument { context: String, argument: String },

    /// The requested quantity is not available for this ensemble.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Invalid model parameter (ensemble parameters, sizes, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative or adaptive routine exhausted its budget.
    #[error("{what} did not converge ({detail})")]
    NonConvergence { what: &'static str, detail: String },

    /// The result exceeds the representable range.
    #[error("overflow in {0}")]
    Overflow(&'static str),

    /// A replicated sampler failed on one replica.
    #[error("replica {index}: {source}")]
    Replica {
        index: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { function, detail: detail.into() }
}
