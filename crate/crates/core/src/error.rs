use thiserror::Error;

use crate::numerics::GaussianFit;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("root not bracketed: f({lo}) = {f_lo:e} and f({hi}) = {f_hi:e} have the same sign")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("{what} did not converge after {iterations} iterations")]
    Convergence { what: &'static str, iterations: usize },

    /// Least-squares fit stopped before meeting its tolerance. The best
    /// iterate found is kept so callers can still inspect it.
    #[error("gaussian fit did not converge after {iterations} iterations (best u={:e}, x={}, v={})", best.u, best.x_deg, best.v_deg)]
    FitNotConverged { best: GaussianFit, iterations: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no solution for eta={eta}: {reason}")]
    NoSolution { eta: f64, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that come from bad input files or settings rather
    /// than from the numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Parse { .. } | Error::Io(_))
    }
}
