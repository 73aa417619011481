use thiserror::Error;

/// Errors raised by the numerical routines and models in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The queue is not stable: the Erlang C formula is only valid for `0 < a < s`.
    #[error("unstable load: a = {a} and s = {s} violate the validity condition 0 < a < s")]
    Unstable { a: f64, s: f64 },

    /// Adaptive quadrature hit its refinement cap before meeting tolerance.
    #[error(
        "quadrature did not converge after {rounds} refinement rounds \
         (estimate {estimate:e}, error bound {error_bound:e})"
    )]
    QuadratureNotConverged {
        estimate: f64,
        error_bound: f64,
        rounds: u32,
    },

    /// An iterative expansion (series, continued fraction) did not converge.
    #[error("{routine} did not converge within {iterations} iterations")]
    IterationLimit {
        routine: &'static str,
        iterations: usize,
    },

    /// The root finder was handed an interval that does not bracket the target.
    #[error("no bracket: f(lo) = {f_lo:e} and f(hi) = {f_hi:e} do not enclose target {target:e}")]
    NoBracket { f_lo: f64, f_hi: f64, target: f64 },

    /// Invalid simulation or quadrature configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Unstable { .. } | Error::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
