//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Cap on the number of subintervals examined in one call.
pub const MAX_INTERVALS: usize = 1_000_000;

const MAX_DEPTH: u32 = 60;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrate `f` over `[a, b]` to within `tol * max(1, |result|)`.
///
/// Panels are refined until the Richardson error estimate `|S2 - S1| / 15`
/// falls under the panel's share of the tolerance. `f` should be smooth on
/// each side of any kink; split the range at kinks for best results.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!("invalid integration range [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }

    // Seed with a coarse composite rule so a narrow feature in the middle of
    // the range cannot slip through the first three samples.
    const SEED_PANELS: usize = 8;
    let h = (b - a) / SEED_PANELS as f64;
    let mut coarse = 0.0;
    let mut stack = Vec::with_capacity(64);
    for i in 0..SEED_PANELS {
        let pa = a + h * i as f64;
        let pb = if i + 1 == SEED_PANELS { b } else { pa + h };
        let pm = 0.5 * (pa + pb);
        let (fa, fm, fb) = (f(pa), f(pm), f(pb));
        let whole = simpson(pa, pb, fa, fm, fb);
        coarse += whole;
        stack.push(Panel {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole,
            eps: 0.0,
            depth: 0,
        });
    }
    let eps_total = tol * coarse.abs().max(1.0);
    for p in &mut stack {
        p.eps = eps_total * (p.b - p.a) / (b - a);
    }

    let mut total = 0.0;
    let mut compensation = 0.0;
    let mut visited = 0usize;
    while let Some(p) = stack.pop() {
        visited += 1;
        if visited > MAX_INTERVALS {
            return Err(Error::Convergence {
                what: "adaptive Simpson quadrature",
                iterations: MAX_INTERVALS,
            });
        }
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if !delta.is_finite() {
            return Err(Error::Domain(format!(
                "integrand is not finite on [{}, {}]",
                p.a, p.b
            )));
        }
        if delta.abs() <= 15.0 * p.eps || p.depth >= MAX_DEPTH {
            // Kahan summation keeps many small panel contributions exact.
            let y = left + right + delta / 15.0 - compensation;
            let t = total + y;
            compensation = (t - total) - y;
            total = t;
        } else {
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                eps: 0.5 * p.eps,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                eps: 0.5 * p.eps,
                depth: p.depth + 1,
            });
        }
    }
    Ok(total)
}
