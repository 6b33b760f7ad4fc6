//! Received power versus azimuth beamwidth for a beam aligned with a
//! cluster.
//!
//! With a rectangular beam of width `dphi` centered on the cluster, the
//! captured power of either channel model has the form
//! `P_full * erf(dphi / w)`: `w = 2 sqrt(2) sigma` and `P_full = P_tot` for
//! the Gaussian spectrum, `w = 2 v` and `P_full = u v sqrt(pi)` for a fitted
//! ray cluster. Received power is directivity times captured power. It
//! tends to a finite limit as `dphi -> 0`, which serves as the reference
//! maximum; the eta-percentile beamwidth is where received power falls to
//! `eta` times that limit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::antenna::{
    directivity_coefficients, elements_for_beamwidth, elements_for_ula_beamwidth,
    DirectivityCoefficients, Sign, UpaDesign, UpaParameterSet, BEAMWIDTH_CONST_DEG,
};
use crate::channel::{fit_cluster, mw_to_dbm, ClusterProfile, GaussianFit, GaussianPas};
use crate::error::{Error, Result};
use crate::numerics::{erf, find_root, integrate, Bracket};

/// Lower end of every percentile search bracket, degrees.
pub const SEARCH_MIN_DEG: f64 = 1e-6;
/// Upper end of the search when the directivity has unbounded support.
pub const SEARCH_MAX_DEG: f64 = 360.0;
/// Steering azimuth used for element counts in percentile solutions.
pub const DEFAULT_PHI0_DEG: f64 = 90.0;

const ROOT_TOL: f64 = 1e-12;
const SCAN_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BeamKind {
    Rectangular,
    Triangular,
}

/// Main-lobe model of a beam: zero gain outside `[steer - w/2, steer + w/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamPattern {
    pub kind: BeamKind,
    pub steer_deg: f64,
    pub width_deg: f64,
}

impl BeamPattern {
    pub fn new(kind: BeamKind, steer_deg: f64, width_deg: f64) -> Result<Self> {
        if !(width_deg > 0.0 && width_deg.is_finite()) || !steer_deg.is_finite() {
            return Err(Error::Domain(format!("beam width must be > 0, got {width_deg}")));
        }
        Ok(Self {
            kind,
            steer_deg,
            width_deg,
        })
    }

    pub fn support(&self) -> (f64, f64) {
        let h = 0.5 * self.width_deg;
        (self.steer_deg - h, self.steer_deg + h)
    }
}

pub fn beam_weight(pattern: &BeamPattern, phi_deg: f64) -> f64 {
    let off = (phi_deg - pattern.steer_deg).abs();
    if off > 0.5 * pattern.width_deg {
        return 0.0;
    }
    match pattern.kind {
        BeamKind::Rectangular => 1.0,
        BeamKind::Triangular => 1.0 - off / pattern.width_deg,
    }
}

/// Power available to an isotropic antenna, `P_inc * lambda^2 / (4 pi)`.
pub fn incident_to_total_power(p_inc_mw_per_m2: f64, wavelength_m: f64) -> Result<f64> {
    if !(p_inc_mw_per_m2 > 0.0) || !(wavelength_m > 0.0) {
        return Err(Error::Domain(format!(
            "incident power density and wavelength must be positive, got {p_inc_mw_per_m2}, {wavelength_m}"
        )));
    }
    Ok(p_inc_mw_per_m2 * wavelength_m * wavelength_m / (4.0 * PI))
}

fn check_width(delta_phi_deg: f64) -> Result<()> {
    if delta_phi_deg >= 0.0 && !delta_phi_deg.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain(format!("beamwidth must be >= 0, got {delta_phi_deg}")))
    }
}

/// Power captured from a Gaussian spectrum by an aligned rectangular beam.
pub fn extracted_power_gaussian(pas: &GaussianPas, delta_phi_deg: f64) -> Result<f64> {
    CaptureChannel::Gaussian(*pas).extracted_power(delta_phi_deg)
}

/// Power captured from a fitted cluster by a rectangular beam centered on
/// the fit.
pub fn extracted_power_fit(fit: &GaussianFit, delta_phi_deg: f64) -> Result<f64> {
    CaptureChannel::Fit(*fit).extracted_power(delta_phi_deg)
}

/// Captured power by quadrature of window times density over the window
/// support. Works for either window shape.
pub fn extracted_power_numeric<F>(pattern: &BeamPattern, density: F, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = pattern.support();
    let integrand = |phi: f64| beam_weight(pattern, phi) * density(phi);
    match pattern.kind {
        BeamKind::Rectangular => integrate(integrand, lo, hi, tol),
        // Split at the apex so each half is smooth.
        BeamKind::Triangular => Ok(integrate(integrand, lo, pattern.steer_deg, tol)?
            + integrate(integrand, pattern.steer_deg, hi, tol)?),
    }
}

/// A channel whose captured power has the closed form `P_full * erf(dphi / w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CaptureChannel {
    Gaussian(GaussianPas),
    Fit(GaussianFit),
}

impl CaptureChannel {
    /// Power captured by an infinitely wide beam, mW.
    pub fn full_power_mw(&self) -> f64 {
        match self {
            CaptureChannel::Gaussian(p) => p.total_power_mw,
            CaptureChannel::Fit(f) => f.u * f.v_deg * PI.sqrt(),
        }
    }

    /// Width `w` in `erf(dphi / w)`, degrees.
    pub fn erf_scale_deg(&self) -> f64 {
        match self {
            CaptureChannel::Gaussian(p) => 2.0 * std::f64::consts::SQRT_2 * p.sigma_deg,
            CaptureChannel::Fit(f) => 2.0 * f.v_deg,
        }
    }

    pub fn center_deg(&self) -> f64 {
        match self {
            CaptureChannel::Gaussian(p) => p.cluster_aoa_deg,
            CaptureChannel::Fit(f) => f.x_deg,
        }
    }

    pub fn density(&self, phi_deg: f64) -> f64 {
        match self {
            CaptureChannel::Gaussian(p) => crate::channel::gaussian_pas_density(p, phi_deg),
            CaptureChannel::Fit(f) => f.density(phi_deg),
        }
    }

    pub fn extracted_power(&self, delta_phi_deg: f64) -> Result<f64> {
        check_width(delta_phi_deg)?;
        if delta_phi_deg.is_infinite() {
            return Ok(self.full_power_mw());
        }
        Ok(self.full_power_mw() * erf(delta_phi_deg / self.erf_scale_deg())?)
    }

    /// `lim_{dphi -> 0} P_ext(dphi) / dphi`, mW/deg.
    fn capture_slope(&self) -> f64 {
        2.0 * self.full_power_mw() / (self.erf_scale_deg() * PI.sqrt())
    }

    pub fn label(&self) -> &'static str {
        match self {
            CaptureChannel::Gaussian(_) => "gaussian",
            CaptureChannel::Fit(_) => "fit",
        }
    }
}

impl From<GaussianPas> for CaptureChannel {
    fn from(p: GaussianPas) -> Self {
        CaptureChannel::Gaussian(p)
    }
}

impl From<GaussianFit> for CaptureChannel {
    fn from(f: GaussianFit) -> Self {
        CaptureChannel::Fit(f)
    }
}

/// Directivity times captured power, mW.
pub fn received_power(set: &UpaParameterSet, channel: &CaptureChannel, delta_phi_deg: f64) -> Result<f64> {
    let d = directivity_coefficients(set)?.directivity(delta_phi_deg)?;
    Ok(d * channel.extracted_power(delta_phi_deg)?)
}

/// Received power in the `dphi -> 0` limit, mW.
///
/// For a Gaussian spectrum this is `A sqrt(pi K / 2) P_tot / sigma`; for a
/// fit it is `A pi sqrt(K) u`.
pub fn max_received_power(set: &UpaParameterSet, channel: &CaptureChannel) -> Result<f64> {
    let c = directivity_coefficients(set)?;
    Ok(upa_gain_slope(&c) * channel.capture_slope())
}

/// `lim_{dphi -> 0} dphi * D(dphi)`.
fn upa_gain_slope(c: &DirectivityCoefficients) -> f64 {
    c.a_coeff * PI * c.k_coeff.sqrt()
}

/// Beamwidth at which received power equals `eta` times its maximum, with
/// the element counts that realize it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PercentileSolution {
    pub eta: f64,
    pub beamwidth_deg: f64,
    pub received_power_mw: f64,
    pub max_power_mw: f64,
    pub design: UpaDesign,
}

pub fn percentile_beamwidth(set: &UpaParameterSet, channel: &CaptureChannel, eta: f64) -> Result<PercentileSolution> {
    percentile_beamwidth_at(set, channel, eta, DEFAULT_PHI0_DEG)
}

/// As [`percentile_beamwidth`] with an explicit steering azimuth for the
/// element translation.
pub fn percentile_beamwidth_at(
    set: &UpaParameterSet,
    channel: &CaptureChannel,
    eta: f64,
    phi0_deg: f64,
) -> Result<PercentileSolution> {
    check_eta(eta)?;
    let c = directivity_coefficients(set)?;
    let w = channel.erf_scale_deg();
    // dphi / (erf(dphi / w) sqrt(K +- dphi^2)) = w sqrt(pi) / (2 sqrt(K) eta)
    let rhs = w * PI.sqrt() / (2.0 * c.k_coeff.sqrt() * eta);
    let s = c.sign.value();
    let lhs = |x: f64| {
        let radicand = (c.k_coeff + s * x * x).max(0.0);
        x / (erf(x / w).unwrap_or(1.0) * radicand.sqrt())
    };
    let hi = match c.sign {
        Sign::Minus => c.domain_max_deg - 1e-6,
        Sign::Plus => SEARCH_MAX_DEG,
    };
    let beamwidth_deg = solve_monotone_form(lhs, rhs, hi, eta)?;
    let max_power_mw = max_received_power(set, channel)?;
    Ok(PercentileSolution {
        eta,
        beamwidth_deg,
        received_power_mw: received_power(set, channel, beamwidth_deg)?,
        max_power_mw,
        design: elements_for_beamwidth(set, beamwidth_deg, phi0_deg)?,
    })
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("eta must be in (0, 1), got {eta}")))
    }
}

/// Smallest `x` in `(SEARCH_MIN_DEG, hi)` with `lhs(x) = rhs`.
///
/// `lhs - rhs` is scanned on a log grid for its first sign change, then
/// refined with the bracketed root finder.
fn solve_monotone_form<F>(lhs: F, rhs: f64, hi: f64, eta: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let f = |x: f64| lhs(x) - rhs;
    let lo = SEARCH_MIN_DEG;
    if !(hi > lo) {
        return Err(Error::NoSolution {
            eta,
            reason: format!("empty search interval ({lo}, {hi}) deg"),
        });
    }
    let ratio = (hi / lo).ln();
    let mut prev_x = lo;
    let mut sup = lhs(lo);
    if f(lo) >= 0.0 {
        return Err(Error::NoSolution {
            eta,
            reason: format!(
                "required ratio {rhs:.6} is below the left-hand side {:.6} already at {lo} deg",
                lhs(lo)
            ),
        });
    }
    for i in 1..=SCAN_POINTS {
        let x = if i == SCAN_POINTS {
            hi
        } else {
            lo * (ratio * i as f64 / SCAN_POINTS as f64).exp()
        };
        let fx = f(x);
        sup = sup.max(lhs(x));
        if fx >= 0.0 {
            return find_root(f, Bracket::new(prev_x, x)?, ROOT_TOL);
        }
        prev_x = x;
    }
    // lhs stays below rhs: eta is smaller than the lowest reachable fraction.
    let floor = eta * rhs / sup;
    Err(Error::NoSolution {
        eta,
        reason: format!(
            "eta is below the reachable floor {floor:.6} within (0, {hi:.4}] deg; \
             received power never drops to eta times its zero-beamwidth limit"
        ),
    })
}

/// ULA received power with `D = 101.5 / dphi`.
pub fn ula_received_power(channel: &CaptureChannel, delta_phi_deg: f64) -> Result<f64> {
    if !(delta_phi_deg > 0.0) {
        return Err(Error::Domain(format!("beamwidth must be > 0, got {delta_phi_deg}")));
    }
    Ok(BEAMWIDTH_CONST_DEG / delta_phi_deg * channel.extracted_power(delta_phi_deg)?)
}

/// ULA received power in the `dphi -> 0` limit, `101.5 P_tot / (sqrt(2 pi) sigma)`
/// for a Gaussian spectrum.
pub fn ula_max_power(channel: &CaptureChannel) -> f64 {
    BEAMWIDTH_CONST_DEG * channel.capture_slope()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UlaSolution {
    pub eta: f64,
    pub beamwidth_deg: f64,
    pub elements: u32,
    pub received_power_mw: f64,
    pub max_power_mw: f64,
}

pub fn ula_percentile_beamwidth(channel: &CaptureChannel, eta: f64) -> Result<UlaSolution> {
    check_eta(eta)?;
    let w = channel.erf_scale_deg();
    let rhs = w * PI.sqrt() / (2.0 * eta);
    let lhs = |x: f64| x / erf(x / w).unwrap_or(1.0);
    let beamwidth_deg = solve_monotone_form(lhs, rhs, SEARCH_MAX_DEG, eta)?;
    Ok(UlaSolution {
        eta,
        beamwidth_deg,
        elements: elements_for_ula_beamwidth(beamwidth_deg),
        received_power_mw: ula_received_power(channel, beamwidth_deg)?,
        max_power_mw: ula_max_power(channel),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Architecture {
    Upa,
    Ula,
}

impl Architecture {
    pub fn name(self) -> &'static str {
        match self {
            Architecture::Upa => "UPA",
            Architecture::Ula => "ULA",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub architecture: Architecture,
    pub eta: f64,
    pub beamwidth_deg: f64,
    pub elements: u64,
    pub power_mw: f64,
    pub power_dbm: f64,
    /// Power relative to the ULA maximum, dB.
    pub delta_db_vs_ula_max: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub upa_max_mw: f64,
    pub ula_max_mw: f64,
    /// `10 log10(upa_max / ula_max)`.
    pub max_gap_db: f64,
}

impl Comparison {
    pub fn row(&self, arch: Architecture, eta: f64) -> Option<&ComparisonRow> {
        self.rows
            .iter()
            .find(|r| r.architecture == arch && (r.eta - eta).abs() < 1e-12)
    }
}

/// Element totals in this range are noted as comparable to an 8x8 array.
pub const SQUARE_8X8_RANGE: (u64, u64) = (49, 100);

/// UPA and ULA percentile points side by side.
pub fn compare_ula_upa(set: &UpaParameterSet, channel: &CaptureChannel, etas: &[f64]) -> Result<Comparison> {
    let upa_max_mw = max_received_power(set, channel)?;
    let ula_max_mw = ula_max_power(channel);
    let vs_ula = |p: f64| 10.0 * (p / ula_max_mw).log10();
    let mut rows = Vec::with_capacity(2 * etas.len());
    for &eta in etas {
        let upa = percentile_beamwidth(set, channel, eta)?;
        let total = upa.design.total_elements();
        let note = (SQUARE_8X8_RANGE.0..=SQUARE_8X8_RANGE.1)
            .contains(&total)
            .then(|| format!("{total} elements; a square 8x8 (64-element) array is comparable"));
        rows.push(ComparisonRow {
            architecture: Architecture::Upa,
            eta,
            beamwidth_deg: upa.beamwidth_deg,
            elements: total,
            power_mw: upa.received_power_mw,
            power_dbm: mw_to_dbm(upa.received_power_mw),
            delta_db_vs_ula_max: vs_ula(upa.received_power_mw),
            note,
        });
    }
    for &eta in etas {
        let ula = ula_percentile_beamwidth(channel, eta)?;
        rows.push(ComparisonRow {
            architecture: Architecture::Ula,
            eta,
            beamwidth_deg: ula.beamwidth_deg,
            elements: u64::from(ula.elements),
            power_mw: ula.received_power_mw,
            power_dbm: mw_to_dbm(ula.received_power_mw),
            delta_db_vs_ula_max: vs_ula(ula.received_power_mw),
            note: None,
        });
    }
    Ok(Comparison {
        rows,
        upa_max_mw,
        ula_max_mw,
        max_gap_db: 10.0 * (upa_max_mw / ula_max_mw).log10(),
    })
}

/// Channel description as given in a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    Gaussian(GaussianPas),
    Fit(GaussianFit),
    Rays {
        cluster: ClusterProfile,
        bin_width_deg: f64,
    },
}

/// Everything needed to evaluate one aligned-beam scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub wavelength_m: f64,
    pub channel: ChannelModel,
    pub set: UpaParameterSet,
    /// Steering azimuth used when translating beamwidths to elements.
    pub phi0_deg: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength_m > 0.0 && self.wavelength_m.is_finite()) {
            return Err(Error::Config(format!(
                "wavelength_m must be > 0, got {}",
                self.wavelength_m
            )));
        }
        self.set.validate()
    }

    /// Reduce the channel to closed-form capture, fitting ray clusters.
    pub fn capture_channel(&self) -> Result<CaptureChannel> {
        match &self.channel {
            ChannelModel::Gaussian(p) => Ok(CaptureChannel::Gaussian(*p)),
            ChannelModel::Fit(f) => Ok(CaptureChannel::Fit(*f)),
            ChannelModel::Rays {
                cluster,
                bin_width_deg,
            } => Ok(CaptureChannel::Fit(fit_cluster(cluster, *bin_width_deg)?)),
        }
    }
}
