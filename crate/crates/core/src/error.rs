use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {what} = {value} ({constraint})")]
    Domain {
        what: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("pole of {what} at {at}")]
    Pole { what: &'static str, at: f64 },

    #[error("{what} did not converge after {iterations} iterations (achieved tolerance {achieved:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        achieved: f64,
    },

    #[error("no sign change of {what} on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoRoot {
        what: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("closed form is numerically singular at beta = {beta} (|beta - {root}| < {width}); use quadrature")]
    NearSingularity { beta: f64, root: f64, width: f64 },

    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, constraint: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            constraint,
        }
    }
}
