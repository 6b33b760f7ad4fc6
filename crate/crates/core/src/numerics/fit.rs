//! Damped least-squares fit of `u * exp(-(phi - x)^2 / v^2)` to sampled
//! angular densities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FIT_MAX_ITERATIONS: usize = 200;
/// Largest relative parameter update accepted as converged.
pub const FIT_REL_TOL: f64 = 1e-10;

/// Gaussian density `u * exp(-(phi - x)^2 / v^2)` in mW per degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    /// Peak density, mW/deg.
    pub u: f64,
    /// Center angle, degrees.
    pub x_deg: f64,
    /// Width, degrees.
    pub v_deg: f64,
}

impl GaussianFit {
    pub fn new(u: f64, x_deg: f64, v_deg: f64) -> Result<Self> {
        if !(u > 0.0 && u.is_finite()) || !(v_deg > 0.0 && v_deg.is_finite()) || !x_deg.is_finite() {
            return Err(Error::Domain(format!(
                "gaussian fit needs u > 0 and v > 0, got u={u}, v={v_deg}"
            )));
        }
        Ok(Self { u, x_deg, v_deg })
    }

    pub fn density(&self, phi_deg: f64) -> f64 {
        let t = (phi_deg - self.x_deg) / self.v_deg;
        self.u * (-t * t).exp()
    }
}

/// Fit a Gaussian to `(angle_deg, density)` samples.
///
/// Densities are normalized by their peak before iterating so the damping
/// term sees parameters of comparable size. The start point comes from the
/// sample moments: center from the weighted mean, width from the weighted
/// standard deviation times sqrt(2), height from the peak.
pub fn fit_gaussian(samples: &[(f64, f64)]) -> Result<GaussianFit> {
    if samples.len() < 5 {
        return Err(Error::Degenerate(format!(
            "gaussian fit needs at least 5 samples, got {}",
            samples.len()
        )));
    }
    let mut peak = 0.0f64;
    let mut nonzero = 0usize;
    for &(phi, d) in samples {
        if !phi.is_finite() || !d.is_finite() || d < 0.0 {
            return Err(Error::Domain(format!(
                "sample ({phi}, {d}) must be finite with non-negative density"
            )));
        }
        if d > 0.0 {
            nonzero += 1;
        }
        peak = peak.max(d);
    }
    if nonzero == 0 {
        return Err(Error::Degenerate("all sample densities are zero".into()));
    }
    if nonzero < 3 {
        return Err(Error::Degenerate(format!(
            "only {nonzero} nonzero sample(s); width is below the sampling grid"
        )));
    }

    let pts: Vec<(f64, f64)> = samples.iter().map(|&(p, d)| (p, d / peak)).collect();
    let mass: f64 = pts.iter().map(|p| p.1).sum();
    let mean = pts.iter().map(|p| p.0 * p.1).sum::<f64>() / mass;
    let var = pts.iter().map(|p| p.1 * (p.0 - mean).powi(2)).sum::<f64>() / mass;
    let mut params = [1.0, mean, (2.0 * var).sqrt()];
    if !(params[2] > 0.0) {
        return Err(Error::Degenerate("samples have zero angular spread".into()));
    }

    let mut cost = sum_sq(&pts, &params);
    let mut lambda = -1.0;
    for _ in 0..FIT_MAX_ITERATIONS {
        let (jtj, jtr) = normal_equations(&pts, &params);
        if lambda < 0.0 {
            lambda = 1e-3 * jtj[0][0].max(jtj[1][1]).max(jtj[2][2]);
        }
        loop {
            let mut damped = jtj;
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += lambda;
            }
            let Some(step) = solve3(damped, jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [params[0] + step[0], params[1] + step[1], params[2] + step[2]];
            let scale = [params[0].abs(), params[1].abs().max(params[2].abs()), params[2].abs()];
            let rel = (0..3)
                .map(|i| step[i].abs() / scale[i])
                .fold(0.0f64, f64::max);
            let trial_cost = sum_sq(&pts, &trial);
            if trial_cost <= cost {
                params = trial;
                cost = trial_cost;
                lambda = (lambda * 0.1).max(f64::MIN_POSITIVE);
                if rel < FIT_REL_TOL {
                    return finish(params, peak);
                }
                break;
            }
            if rel < FIT_REL_TOL {
                // Even a vanishing step cannot lower the cost: at the minimum.
                return finish(params, peak);
            }
            lambda *= 10.0;
        }
    }
    let best = GaussianFit {
        u: params[0] * peak,
        x_deg: params[1],
        v_deg: params[2].abs(),
    };
    Err(Error::FitNotConverged {
        best,
        iterations: FIT_MAX_ITERATIONS,
    })
}

fn finish(params: [f64; 3], peak: f64) -> Result<GaussianFit> {
    let [u, x, v] = params;
    if !(u > 0.0) || v == 0.0 || !v.is_finite() {
        return Err(Error::Degenerate(format!(
            "fit collapsed to u={u}, v={v}"
        )));
    }
    // The model depends on v only through v^2.
    GaussianFit::new(u * peak, x, v.abs())
}

fn sum_sq(pts: &[(f64, f64)], p: &[f64; 3]) -> f64 {
    pts.iter()
        .map(|&(phi, y)| {
            let t = (phi - p[1]) / p[2];
            let r = y - p[0] * (-t * t).exp();
            r * r
        })
        .sum()
}

fn normal_equations(pts: &[(f64, f64)], p: &[f64; 3]) -> ([[f64; 3]; 3], [f64; 3]) {
    let mut jtj = [[0.0; 3]; 3];
    let mut jtr = [0.0; 3];
    for &(phi, y) in pts {
        let t = (phi - p[1]) / p[2];
        let e = (-t * t).exp();
        let m = p[0] * e;
        let j = [e, m * 2.0 * t / p[2], m * 2.0 * t * t / p[2]];
        let r = y - m;
        for a in 0..3 {
            jtr[a] += j[a] * r;
            for b in 0..3 {
                jtj[a][b] += j[a] * j[b];
            }
        }
    }
    (jtj, jtr)
}

/// Solve a 3x3 system by Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            #[allow(clippy::needless_range_loop)]
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
