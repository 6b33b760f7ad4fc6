//! TOML scenario files.
//!
//! ```toml
//! wavelength_m = 0.005
//!
//! [channel]
//! model = "gaussian"          # gaussian | fit | rays
//! sigma_deg = 5.0
//! cluster_aoa_deg = 90.0
//! total_power_mw = 1.0        # or total_power_dbm, or incident_power_mw_per_m2
//!
//! [antenna]
//! set = 4                     # 1-4 or "custom"
//! exact_eq13 = false
//!
//! [solve]
//! eta = [0.95, 0.5]
//!
//! [sweep]
//! range = "0.5:13.5:0.1"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::antenna::UpaParameterSet;
use crate::channel::{dbm_to_mw, read_ray_file, GaussianFit, GaussianPas, SynthConfig};
use crate::error::{Error, Result};
use crate::power::{incident_to_total_power, ChannelModel, ScenarioConfig, DEFAULT_PHI0_DEG};

pub const DEFAULT_WAVELENGTH_M: f64 = 0.005;
pub const DEFAULT_ETAS: [f64; 2] = [0.95, 0.5];
pub const DEFAULT_RANGE: SweepRange = SweepRange {
    lo: 0.5,
    hi: 13.5,
    step: 0.1,
};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub wavelength_m: Option<f64>,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub antenna: AntennaSection,
    #[serde(default)]
    pub solve: SolveSection,
    #[serde(default)]
    pub sweep: SweepSection,
    pub synth: Option<SynthConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    #[serde(default = "default_model")]
    pub model: String,
    pub sigma_deg: Option<f64>,
    pub cluster_aoa_deg: Option<f64>,
    pub total_power_mw: Option<f64>,
    pub total_power_dbm: Option<f64>,
    pub incident_power_mw_per_m2: Option<f64>,
    pub u: Option<f64>,
    pub x_deg: Option<f64>,
    pub v_deg: Option<f64>,
    pub ray_file: Option<PathBuf>,
    pub bin_width_deg: Option<f64>,
}

fn default_model() -> String {
    "gaussian".into()
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            model: default_model(),
            sigma_deg: None,
            cluster_aoa_deg: None,
            total_power_mw: None,
            total_power_dbm: None,
            incident_power_mw_per_m2: None,
            u: None,
            x_deg: None,
            v_deg: None,
            ray_file: None,
            bin_width_deg: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetRef {
    Id(u32),
    Name(String),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaSection {
    pub set: Option<SetRef>,
    #[serde(default)]
    pub exact_eq13: bool,
    pub phi0_deg: Option<f64>,
    pub delta_phi_y_deg: Option<f64>,
    pub delta_theta_deg: Option<f64>,
    pub theta0_deg: Option<f64>,
    pub prefactor_override: Option<f64>,
    pub radicand_override: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub eta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub range: Option<String>,
}

/// Inclusive beamwidth grid `lo, lo + step, ..., hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(Error::Config(format!("range must be lo:hi:step, got `{s}`")));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("range component `{v}` is not a number")))
        };
        let r = Self {
            lo: num(lo)?,
            hi: num(hi)?,
            step: num(step)?,
        };
        if !(r.lo.is_finite() && r.hi.is_finite() && r.step > 0.0 && r.step.is_finite() && r.lo <= r.hi) {
            return Err(Error::Config(format!("range needs lo <= hi and step > 0, got `{s}`")));
        }
        Ok(r)
    }

    /// Grid points, each computed as `lo + i * step` to avoid drift. The
    /// last point is included when it lands within 1e-9 step of `hi`.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| ((self.lo + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

/// Command-line settings that take precedence over the scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub set: Option<String>,
    pub exact_eq13: bool,
}

/// A scenario after defaulting, ready to evaluate.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ScenarioConfig,
    pub etas: Vec<f64>,
    pub range: SweepRange,
    pub synth: SynthConfig,
    pub exact_eq13: bool,
}

pub fn load(path: Option<&Path>) -> Result<(ScenarioFile, PathBuf)> {
    match path {
        None => Ok((ScenarioFile::default(), PathBuf::from("."))),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read scenario {}: {e}", p.display())))?;
            let file: ScenarioFile = toml::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            let dir = p.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
            Ok((file, dir))
        }
    }
}

pub fn resolve(file: &ScenarioFile, base_dir: &Path, ov: &Overrides) -> Result<Resolved> {
    let wavelength_m = file.wavelength_m.unwrap_or(DEFAULT_WAVELENGTH_M);
    let channel = resolve_channel(&file.channel, wavelength_m, base_dir)?;
    let exact_eq13 = ov.exact_eq13 || file.antenna.exact_eq13;
    let set = resolve_set(&file.antenna, ov.set.as_deref(), exact_eq13)?;
    let config = ScenarioConfig {
        wavelength_m,
        channel,
        set,
        phi0_deg: file.antenna.phi0_deg.unwrap_or(DEFAULT_PHI0_DEG),
    };
    config.validate().map_err(to_config)?;
    let etas = file.solve.eta.clone().unwrap_or_else(|| DEFAULT_ETAS.to_vec());
    let range = match &file.sweep.range {
        Some(r) => SweepRange::parse(r)?,
        None => DEFAULT_RANGE,
    };
    Ok(Resolved {
        config,
        etas,
        range,
        synth: file.synth.clone().unwrap_or_default(),
        exact_eq13,
    })
}

fn to_config(e: Error) -> Error {
    match e {
        Error::Domain(m) | Error::Degenerate(m) => Error::Config(m),
        other => other,
    }
}

fn resolve_channel(ch: &ChannelSection, wavelength_m: f64, base_dir: &Path) -> Result<ChannelModel> {
    match ch.model.as_str() {
        "gaussian" => {
            let total = match (ch.total_power_mw, ch.total_power_dbm, ch.incident_power_mw_per_m2) {
                (Some(mw), None, None) => mw,
                (None, Some(dbm), None) => dbm_to_mw(dbm),
                (None, None, Some(p_inc)) => incident_to_total_power(p_inc, wavelength_m).map_err(to_config)?,
                (None, None, None) => 1.0,
                _ => {
                    return Err(Error::Config(
                        "give only one of total_power_mw, total_power_dbm, incident_power_mw_per_m2".into(),
                    ))
                }
            };
            let pas = GaussianPas::new(
                ch.sigma_deg.unwrap_or(5.0),
                ch.cluster_aoa_deg.unwrap_or(90.0),
                total,
            )
            .map_err(to_config)?;
            Ok(ChannelModel::Gaussian(pas))
        }
        "fit" => {
            let (Some(u), Some(v)) = (ch.u, ch.v_deg) else {
                return Err(Error::Config("channel model `fit` needs u and v_deg".into()));
            };
            let fit = GaussianFit::new(u, ch.x_deg.unwrap_or(90.0), v).map_err(to_config)?;
            Ok(ChannelModel::Fit(fit))
        }
        "rays" => {
            let Some(rel) = &ch.ray_file else {
                return Err(Error::Config("channel model `rays` needs ray_file".into()));
            };
            let path = if rel.is_absolute() { rel.clone() } else { base_dir.join(rel) };
            let file = read_ray_file(&path)?;
            let bin_width_deg = ch.bin_width_deg.unwrap_or(1.0);
            if !(bin_width_deg > 0.0) {
                return Err(Error::Config(format!("bin_width_deg must be > 0, got {bin_width_deg}")));
            }
            Ok(ChannelModel::Rays {
                cluster: file.cluster,
                bin_width_deg,
            })
        }
        other => Err(Error::Config(format!(
            "unknown channel model `{other}` (expected gaussian, fit or rays)"
        ))),
    }
}

fn resolve_set(ant: &AntennaSection, cli_set: Option<&str>, exact: bool) -> Result<UpaParameterSet> {
    let choice = match cli_set {
        Some(s) => match s.parse::<u32>() {
            Ok(id) => SetRef::Id(id),
            Err(_) => SetRef::Name(s.to_string()),
        },
        None => ant.set.clone().unwrap_or(SetRef::Id(4)),
    };
    let set = match choice {
        SetRef::Id(id) => UpaParameterSet::registry(id)?,
        SetRef::Name(name) if name == "custom" => {
            let (Some(y), Some(t), Some(th)) = (ant.delta_phi_y_deg, ant.delta_theta_deg, ant.theta0_deg) else {
                return Err(Error::Config(
                    "custom set needs delta_phi_y_deg, delta_theta_deg and theta0_deg in [antenna]".into(),
                ));
            };
            let mut set = UpaParameterSet::new(0, y, t, th).map_err(to_config)?;
            set.prefactor_override = ant.prefactor_override;
            set.radicand_override = ant.radicand_override;
            set.validate().map_err(to_config)?;
            set
        }
        SetRef::Name(name) => {
            return Err(Error::Config(format!("unknown set `{name}` (expected 1-4 or custom)")))
        }
    };
    Ok(if exact { set.exact() } else { set })
}
