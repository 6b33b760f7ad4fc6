//! Beamwidth planning for rectangular uniform planar array (UPA) receivers
//! pointed at millimeter-wave channel clusters.
//!
//! The crate combines the antenna side (directivity as a function of the
//! azimuth half-power beamwidth for a fixed elevation design) with the
//! channel side (power captured from a Gaussian power-angle spectrum or
//! from a ray cluster) to get received power versus beamwidth, its
//! zero-beamwidth limit, and the beamwidth and element count needed to
//! reach a chosen fraction of that limit.
//!
//! - [`numerics`]: erf, root finding, quadrature, Gaussian least squares.
//! - [`channel`]: Gaussian power-angle spectra and ray clusters.
//! - [`antenna`]: UPA/ULA directivity and beamwidth algebra.
//! - [`power`]: extracted and received power, maxima, percentile solving.
//! - [`cli`]: the `beamplan` command-line front end.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod antenna;
pub mod channel;
pub mod cli;
pub mod numerics;
pub mod power;

pub use error::{Error, Result};
