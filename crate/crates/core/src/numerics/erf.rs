//! Error function.
//!
//! Below |x| = 3 the series
//!   erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n 2^n x^(2n+1) / (1*3*...*(2n+1))
//! is used; all of its terms are positive so there is no cancellation.
//! Above that, erfc is evaluated from its continued fraction with the
//! modified Lentz algorithm.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 3.0;
const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Gaussian error function, accurate to about 1e-15 absolute.
pub fn erf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("erf argument must be finite, got {x}")));
    }
    let ax = x.abs();
    let value = if ax < SERIES_LIMIT {
        series(ax)
    } else {
        1.0 - erfc_tail(ax)
    };
    Ok(value.copysign(x).clamp(-1.0, 1.0))
}

/// Complementary error function, 1 - erf(x).
pub fn erfc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("erfc argument must be finite, got {x}")));
    }
    if x >= SERIES_LIMIT {
        Ok(erfc_tail(x))
    } else if x <= -SERIES_LIMIT {
        Ok(2.0 - erfc_tail(-x))
    } else {
        Ok(1.0 - series(x.abs()).copysign(x))
    }
}

fn series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= 2.0 * x2 / f64::from(2 * n + 1);
        sum += term;
        if term < sum * 1e-17 || n > 200 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// erfc(x) for x >= 3 via
///   erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
fn erfc_tail(x: f64) -> f64 {
    if x > 27.0 {
        return 0.0;
    }
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = f64::from(k) * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}
