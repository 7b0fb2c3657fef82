use thiserror::Error;

/// Errors shared by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A point violates a chart or system domain predicate.
    #[error("domain violation: {0}")]
    Domain(String),

    /// A NaN or infinity appeared during evaluation. Evaluation aborts
    /// instead of letting non-finite values propagate into residuals.
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    /// Two observables (or an observable and a point) live on phase spaces
    /// of different dimension.
    #[error("phase-space dimension mismatch: {lhs} vs {rhs}")]
    DimensionMismatch { lhs: usize, rhs: usize },

    /// Inconsistent tier/parameter combination in a system spec.
    #[error("invalid system spec: {0}")]
    Spec(String),

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    /// An operation that requires a homogeneous quadratic momentum
    /// polynomial was handed something else.
    #[error("degree probe failed: {0}")]
    Degree(String),

    #[error("singular metric: {0}")]
    SingularMetric(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Implicit stage equations failed to converge even after the Newton
    /// fallback.
    #[error("implicit solver failed to converge: {0}")]
    Convergence(String),

    /// The rejection sampler could not find an in-domain point.
    #[error("sampler exhausted after {0} rejected attempts")]
    SamplerExhausted(usize),

    /// A trajectory left the admissible region; integration stops and
    /// reports the exit time.
    #[error("trajectory left the admissible domain at t = {t}")]
    DomainExit { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
