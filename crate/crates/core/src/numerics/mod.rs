//! Numeric kernels shared by the channel, antenna and power modules.
//!
//! Everything here is a pure function of its arguments.

mod erf;
mod fit;
mod quadrature;
mod roots;

pub use erf::{erf, erfc};
pub use fit::{fit_gaussian, GaussianFit, FIT_MAX_ITERATIONS, FIT_REL_TOL};
pub use quadrature::{integrate, MAX_INTERVALS};
pub use roots::{find_root, Bracket, MAX_ITERATIONS};
