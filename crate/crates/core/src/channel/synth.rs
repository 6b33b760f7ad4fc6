//! Synthetic ray clusters.
//!
//! Stands in for a ray tracer: rays are evenly spaced over the angle
//! spread and their powers follow a chosen envelope, scaled so that the
//! binned profile has the requested peak density. Phases and delays are
//! drawn from a seeded generator and do not affect power.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClusterProfile, Ray, Specular};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Envelope {
    /// `exp(-offset^2 / width^2)`
    Gaussian,
    Uniform,
    /// `exp(-|offset| / width)`
    Exponential,
}

impl Envelope {
    fn shape(self, offset_deg: f64, width_deg: f64) -> f64 {
        match self {
            Envelope::Gaussian => (-(offset_deg / width_deg).powi(2)).exp(),
            Envelope::Uniform => 1.0,
            Envelope::Exponential => (-(offset_deg / width_deg).abs()).exp(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Envelope::Gaussian => "gaussian",
            Envelope::Uniform => "uniform",
            Envelope::Exponential => "exponential",
        }
    }
}

impl FromStr for Envelope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Envelope::Gaussian),
            "uniform" => Ok(Envelope::Uniform),
            "exponential" => Ok(Envelope::Exponential),
            _ => Err(Error::Config(format!(
                "unknown envelope `{s}` (expected gaussian, uniform or exponential)"
            ))),
        }
    }
}

impl TryFrom<String> for Envelope {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Envelope> for String {
    fn from(e: Envelope) -> Self {
        e.name().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_rays: usize,
    pub sas_deg: f64,
    pub envelope: Envelope,
    /// Peak of the binned density, mW/deg.
    pub peak_density_mw_per_deg: f64,
    /// Envelope width parameter, degrees.
    pub width_deg: f64,
    pub specular_amplitude: f64,
    pub specular_aoa_deg: f64,
    pub specular_phase_rad: f64,
    pub specular_toa_s: f64,
    /// Ray delays are drawn uniformly from `[0, max_delay_s]`.
    pub max_delay_s: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_rays: 73,
            sas_deg: 72.0,
            envelope: Envelope::Gaussian,
            peak_density_mw_per_deg: 6.434e-5,
            width_deg: 9.23,
            specular_amplitude: 0.0,
            specular_aoa_deg: 90.0,
            specular_phase_rad: 0.0,
            specular_toa_s: 0.0,
            max_delay_s: 5e-9,
            seed: 1,
        }
    }
}

pub fn synthesize_cluster(cfg: &SynthConfig) -> Result<ClusterProfile> {
    if !(cfg.sas_deg >= 0.0 && cfg.sas_deg.is_finite()) {
        return Err(Error::Config(format!("sas_deg must be >= 0, got {}", cfg.sas_deg)));
    }
    if !(cfg.peak_density_mw_per_deg >= 0.0) || !(cfg.width_deg > 0.0) {
        return Err(Error::Config(
            "peak_density_mw_per_deg must be >= 0 and width_deg > 0".into(),
        ));
    }
    if !(cfg.max_delay_s >= 0.0) {
        return Err(Error::Config("max_delay_s must be >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_rays;
    let half = 0.5 * cfg.sas_deg;
    let spacing = if n > 1 { cfg.sas_deg / (n - 1) as f64 } else { 0.0 };
    // Each ray's power times S/N equals density times spacing.
    let power_scale = if n > 1 && cfg.sas_deg > 0.0 {
        spacing * n as f64 / cfg.sas_deg
    } else {
        1.0
    };

    let mut rays = Vec::with_capacity(n);
    for k in 0..n {
        let offset = match k {
            0 if n > 1 => -half,
            _ if n == 1 => 0.0,
            _ if k == n - 1 => half,
            _ => -half + spacing * k as f64,
        };
        let power = cfg.peak_density_mw_per_deg * cfg.envelope.shape(offset, cfg.width_deg) * power_scale;
        let phase = rng.gen_range(0.0..2.0 * PI);
        let delay = if cfg.max_delay_s > 0.0 {
            rng.gen_range(0.0..=cfg.max_delay_s)
        } else {
            0.0
        };
        rays.push(Ray::new(offset, power.sqrt(), phase, delay)?);
    }
    let specular = Specular {
        amplitude: cfg.specular_amplitude,
        phase_rad: cfg.specular_phase_rad,
        toa_s: cfg.specular_toa_s,
        aoa_deg: cfg.specular_aoa_deg,
    };
    ClusterProfile::new(specular, rays)
}
