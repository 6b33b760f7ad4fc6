//! Rectangular UPA and ULA directivity versus azimuth beamwidth.
//!
//! A uniformly excited ULA with half-wavelength spacing has a half-power
//! beamwidth of `101.5 / elements` degrees and a broadside directivity equal
//! to its element count. A large rectangular UPA built from an x-axis ULA
//! (M elements) and a y-axis ULA (N elements) has directivity
//! `pi * cos(theta0) * M * N`. Fixing the elevation side of the design
//! (`delta_phi_y`, `delta_theta`, `theta0`) leaves the directivity as a
//! function of the azimuth beamwidth alone:
//!
//! ```text
//! D(dphi) = A * pi * sqrt(K + sign * dphi^2) / dphi
//! ```
//!
//! Angles are in degrees throughout; K is in deg^2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Beamwidth-element product of a uniform lambda/2 ULA, degrees.
pub const BEAMWIDTH_CONST_DEG: f64 = 101.5;
/// Smallest element count per axis for the large-array approximations.
pub const MIN_LARGE_ARRAY: u32 = 7;
/// Allowed slack on `theta0 + delta_theta / 2 = 90` deg.
pub const C3_TOLERANCE_DEG: f64 = 2.0;

/// Fixed elevation-side design of a rectangular UPA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpaParameterSet {
    pub id: u32,
    /// Broadside beamwidth of the y-axis ULA.
    pub delta_phi_y_deg: f64,
    /// Elevation beamwidth.
    pub delta_theta_deg: f64,
    /// Elevation scan angle.
    pub theta0_deg: f64,
    /// Replaces the computed prefactor A when set.
    #[serde(default)]
    pub prefactor_override: Option<f64>,
    /// Replaces the computed radicand constant K when set.
    #[serde(default)]
    pub radicand_override: Option<f64>,
}

/// Rounded `(A, K, sign)` coefficients as listed for the four candidate sets.
pub const PRINTED_COEFFICIENTS: [(f64, f64, Sign); 4] = [
    (20.0, 84.68, Sign::Plus),
    (5.91, 1703.0, Sign::Plus),
    (22.93, 229.0, Sign::Minus),
    (45.9, 190.0, Sign::Minus),
];

impl UpaParameterSet {
    pub fn new(id: u32, delta_phi_y_deg: f64, delta_theta_deg: f64, theta0_deg: f64) -> Result<Self> {
        let set = Self {
            id,
            delta_phi_y_deg,
            delta_theta_deg,
            theta0_deg,
            prefactor_override: None,
            radicand_override: None,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.delta_phi_y_deg) || !positive(self.delta_theta_deg) {
            return Err(Error::Domain(format!(
                "set {}: beamwidths must be positive (delta_phi_y={}, delta_theta={})",
                self.id, self.delta_phi_y_deg, self.delta_theta_deg
            )));
        }
        if !(0.0..90.0).contains(&self.theta0_deg) {
            return Err(Error::Domain(format!(
                "set {}: theta0 must be in [0, 90) deg, got {}",
                self.id, self.theta0_deg
            )));
        }
        for v in [self.prefactor_override, self.radicand_override].into_iter().flatten() {
            if !positive(v) {
                return Err(Error::Domain(format!(
                    "set {}: coefficient overrides must be positive, got {v}",
                    self.id
                )));
            }
        }
        Ok(())
    }

    /// One of the four built-in candidate sets. Set 4 carries the printed
    /// coefficients (A = 45.9, K = 190) as overrides, since they differ
    /// from what its angles give; use [`Self::exact`] to drop them.
    pub fn registry(id: u32) -> Result<Self> {
        let (y, t, th) = match id {
            1 => (14.5, 30.0, 75.0),
            2 => (14.5, 40.0, 70.0),
            3 => (10.15, 40.0, 70.0),
            4 => (10.15, 30.0, 60.0),
            _ => return Err(Error::Config(format!("no built-in parameter set {id} (expected 1-4)"))),
        };
        let mut set = Self::new(id, y, t, th)?;
        if id == 4 {
            set.prefactor_override = Some(45.9);
            set.radicand_override = Some(190.0);
        }
        Ok(set)
    }

    /// All built-in sets in id order.
    pub fn registry_all() -> Vec<Self> {
        (1..=4).map(|id| Self::registry(id).expect("built-in set")).collect()
    }

    /// Same angles with the coefficient overrides removed.
    pub fn exact(mut self) -> Self {
        self.prefactor_override = None;
        self.radicand_override = None;
        self
    }

    pub fn has_override(&self) -> bool {
        self.prefactor_override.is_some() || self.radicand_override.is_some()
    }

    /// `delta_theta * cos(theta0)`, degrees.
    fn projected_theta(&self) -> f64 {
        self.delta_theta_deg * self.theta0_deg.to_radians().cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `D(dphi) = a_coeff * pi * sqrt(k_coeff + sign * dphi^2) / dphi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectivityCoefficients {
    pub a_coeff: f64,
    /// deg^2
    pub k_coeff: f64,
    pub sign: Sign,
    /// `sqrt(k_coeff)` for [`Sign::Minus`], infinite otherwise.
    pub domain_max_deg: f64,
}

impl DirectivityCoefficients {
    pub fn directivity(&self, delta_phi_deg: f64) -> Result<f64> {
        self.check_domain(delta_phi_deg)?;
        let radicand = (self.k_coeff + self.sign.value() * delta_phi_deg * delta_phi_deg).max(0.0);
        Ok(self.a_coeff * std::f64::consts::PI * radicand.sqrt() / delta_phi_deg)
    }

    pub fn check_domain(&self, delta_phi_deg: f64) -> Result<()> {
        if !(delta_phi_deg > 0.0 && delta_phi_deg.is_finite()) {
            return Err(Error::Domain(format!(
                "azimuth beamwidth must be positive, got {delta_phi_deg} deg"
            )));
        }
        if delta_phi_deg > self.domain_max_deg {
            return Err(Error::Domain(format!(
                "azimuth beamwidth {delta_phi_deg} deg exceeds the directivity support \
                 sqrt(K) = {:.4} deg of this parameter set (constraint 2 violated)",
                self.domain_max_deg
            )));
        }
        Ok(())
    }
}

/// Broadside UPA directivity with a flag for arrays too small for the
/// large-array formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BroadsideDirectivity {
    pub value: f64,
    pub large_array: bool,
}

/// `pi * cos(theta0) * N * M`.
pub fn upa_directivity_broadside(m: u32, n: u32, theta0_deg: f64) -> Result<BroadsideDirectivity> {
    if !(0.0..90.0).contains(&theta0_deg) {
        return Err(Error::Domain(format!("theta0 must be in [0, 90) deg, got {theta0_deg}")));
    }
    Ok(BroadsideDirectivity {
        value: std::f64::consts::PI * theta0_deg.to_radians().cos() * f64::from(n) * f64::from(m),
        large_array: m >= MIN_LARGE_ARRAY && n >= MIN_LARGE_ARRAY,
    })
}

/// Half-power beamwidth of a uniform lambda/2 ULA, degrees.
pub fn ula_beamwidth_deg(elements: u32) -> f64 {
    BEAMWIDTH_CONST_DEG / f64::from(elements.max(1))
}

/// Broadside directivity of a uniformly excited ULA.
pub fn ula_directivity(elements: u32) -> f64 {
    f64::from(elements)
}

/// Elements needed for a beamwidth no wider than `beamwidth_deg`.
///
/// Quotients within 1e-9 relative of an integer are taken as that integer,
/// so `101.5 / (101.5 / k)` gives back `k` despite rounding.
pub fn elements_for_ula_beamwidth(beamwidth_deg: f64) -> u32 {
    let q = BEAMWIDTH_CONST_DEG / beamwidth_deg;
    let q = (q - 1e-9 * q.max(1.0)).ceil();
    q.clamp(1.0, f64::from(u32::MAX)) as u32
}

/// Elevation and azimuth beamwidths of a large rectangular UPA built from
/// x- and y-axis ULAs with the given broadside beamwidths, scanned to
/// `(theta0, phi0)`. Returns `(delta_theta, delta_phi)`.
pub fn upa_beamwidths(
    delta_phi_x_deg: f64,
    delta_phi_y_deg: f64,
    theta0_deg: f64,
    phi0_deg: f64,
) -> (f64, f64) {
    let (sp, cp) = phi0_deg.to_radians().sin_cos();
    let (s2, c2) = (sp * sp, cp * cp);
    let ix = delta_phi_x_deg.powi(-2);
    let iy = delta_phi_y_deg.powi(-2);
    let ct = theta0_deg.to_radians().cos();
    let delta_theta = 1.0 / (ct * (ix * c2 + iy * s2).sqrt());
    let delta_phi = 1.0 / (ix * s2 + iy * c2).sqrt();
    (delta_theta, delta_phi)
}

/// Broadside beamwidth of the x-axis ULA that yields azimuth beamwidth
/// `delta_phi` for the given elevation-side design.
pub fn solve_delta_phi_x(
    delta_theta_deg: f64,
    theta0_deg: f64,
    delta_phi_y_deg: f64,
    delta_phi_deg: f64,
) -> Result<f64> {
    let c = delta_theta_deg * theta0_deg.to_radians().cos();
    let y = delta_phi_y_deg;
    let dphi2 = delta_phi_deg * delta_phi_deg;
    let radicand = dphi2 * (y * y - c * c) + c * c * y * y;
    if !(radicand > 0.0) {
        return Err(Error::Domain(format!(
            "no real x-axis beamwidth for delta_phi={delta_phi_deg} deg: radicand {radicand:.4e} <= 0 \
             (constraint 2, delta_phi_y^2 - delta_theta^2 cos^2 theta0 >= 0, is violated here)"
        )));
    }
    Ok(c * y * delta_phi_deg / radicand.sqrt())
}

/// Coefficients of `D(dphi)` for a parameter set.
pub fn directivity_coefficients(set: &UpaParameterSet) -> Result<DirectivityCoefficients> {
    set.validate()?;
    let c = set.projected_theta();
    let y = set.delta_phi_y_deg;
    let diff = y * y - c * c;
    if diff == 0.0 {
        return Err(Error::Degenerate(format!(
            "set {}: delta_phi_y = delta_theta cos(theta0); directivity reduces to \
             101.5^2 pi / (delta_theta delta_phi) with no radical",
            set.id
        )));
    }
    let sign = if diff > 0.0 { Sign::Plus } else { Sign::Minus };
    let a = BEAMWIDTH_CONST_DEG.powi(2) * diff.abs().sqrt() / (set.delta_theta_deg * y * y);
    let k = c * c * y * y / diff.abs();
    let a_coeff = set.prefactor_override.unwrap_or(a);
    let k_coeff = set.radicand_override.unwrap_or(k);
    let domain_max_deg = match sign {
        Sign::Minus => k_coeff.sqrt(),
        Sign::Plus => f64::INFINITY,
    };
    Ok(DirectivityCoefficients {
        a_coeff,
        k_coeff,
        sign,
        domain_max_deg,
    })
}

pub fn directivity_at(set: &UpaParameterSet, delta_phi_deg: f64) -> Result<f64> {
    directivity_coefficients(set)?.directivity(delta_phi_deg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintReport {
    /// `delta_phi_y <= 101.5 / 7`
    pub c1_pass: bool,
    /// `delta_phi_y^2 - delta_theta^2 cos^2(theta0) >= 0`
    pub c2_pass: bool,
    /// `|theta0 + delta_theta / 2 - 90| <= 2`
    pub c3_pass: bool,
    pub c2_value: f64,
    pub c3_sum_deg: f64,
}

impl ConstraintReport {
    pub fn all_pass(&self) -> bool {
        self.c1_pass && self.c2_pass && self.c3_pass
    }
}

pub fn check_constraints(set: &UpaParameterSet) -> ConstraintReport {
    let c = set.projected_theta();
    let y = set.delta_phi_y_deg;
    let c2_value = y * y - c * c;
    let c3_sum_deg = set.theta0_deg + 0.5 * set.delta_theta_deg;
    ConstraintReport {
        c1_pass: y <= BEAMWIDTH_CONST_DEG / f64::from(MIN_LARGE_ARRAY),
        c2_pass: c2_value >= 0.0,
        c3_pass: (c3_sum_deg - 90.0).abs() <= C3_TOLERANCE_DEG,
        c2_value,
        c3_sum_deg,
    }
}

/// Element layout of a rectangular UPA with lambda/2 spacing on both axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpaDesign {
    /// Elements along x.
    pub m_elements: u32,
    /// Elements along y.
    pub n_elements: u32,
    pub theta0_deg: f64,
    pub phi0_deg: f64,
    pub delta_phi_x_deg: f64,
    pub delta_phi_deg: f64,
}

impl UpaDesign {
    pub fn total_elements(&self) -> u64 {
        u64::from(self.m_elements) * u64::from(self.n_elements)
    }

    /// Both axes meet the large-array assumption.
    pub fn large_array(&self) -> bool {
        self.m_elements >= MIN_LARGE_ARRAY && self.n_elements >= MIN_LARGE_ARRAY
    }
}

/// Element counts that realize azimuth beamwidth `delta_phi` with the set's
/// elevation-side design.
///
/// The x-axis beamwidth follows from the set's `(delta_theta, theta0,
/// delta_phi_y)` alone; `phi0_deg` is the steering azimuth recorded in the
/// design.
pub fn elements_for_beamwidth(set: &UpaParameterSet, delta_phi_deg: f64, phi0_deg: f64) -> Result<UpaDesign> {
    set.validate()?;
    if !(delta_phi_deg > 0.0 && delta_phi_deg.is_finite()) {
        return Err(Error::Domain(format!(
            "azimuth beamwidth must be positive, got {delta_phi_deg} deg"
        )));
    }
    let dx = solve_delta_phi_x(set.delta_theta_deg, set.theta0_deg, set.delta_phi_y_deg, delta_phi_deg)?;
    Ok(UpaDesign {
        m_elements: elements_for_ula_beamwidth(dx),
        n_elements: elements_for_ula_beamwidth(set.delta_phi_y_deg),
        theta0_deg: set.theta0_deg,
        phi0_deg,
        delta_phi_x_deg: dx,
        delta_phi_deg,
    })
}

/// Element counts for a UPA steered to azimuth `phi0` with a given y-axis
/// beamwidth, when the elevation beamwidth is left free: the x-axis
/// beamwidth comes from inverting the azimuth beamwidth relation at `phi0`.
/// At `phi0 = 90` deg this is simply `delta_phi_x = delta_phi`.
pub fn elements_for_scan(
    delta_phi_y_deg: f64,
    theta0_deg: f64,
    delta_phi_deg: f64,
    phi0_deg: f64,
) -> Result<UpaDesign> {
    let (sp, cp) = phi0_deg.to_radians().sin_cos();
    let rem = delta_phi_deg.powi(-2) - cp * cp * delta_phi_y_deg.powi(-2);
    if !(delta_phi_deg > 0.0) || !(rem > 0.0) || sp.abs() < 1e-12 {
        return Err(Error::Domain(format!(
            "azimuth beamwidth {delta_phi_deg} deg is not reachable at phi0={phi0_deg} deg \
             with delta_phi_y={delta_phi_y_deg} deg"
        )));
    }
    let dx = sp.abs() / rem.sqrt();
    Ok(UpaDesign {
        m_elements: elements_for_ula_beamwidth(dx),
        n_elements: elements_for_ula_beamwidth(delta_phi_y_deg),
        theta0_deg,
        phi0_deg,
        delta_phi_x_deg: dx,
        delta_phi_deg,
    })
}
