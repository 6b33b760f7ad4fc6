//! Ray-list CSV files.
//!
//! ```text
//! # specular_aoa_deg=90
//! # specular_amplitude=0.01
//! # specular_toa_s=0
//! offset_aoa_deg,amplitude,phase_rad,delay_s
//! -36.1,0.00123,1.57,2.1e-9
//! ```
//!
//! `amplitude` (sqrt(mW)) may be replaced by a `power_dbm` column, and
//! `specular_amplitude` by `specular_power_dbm`. `specular_phase_rad`
//! defaults to 0. Other `# key=value` lines are kept as metadata.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{dbm_to_mw, ClusterProfile, Ray, Specular};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RayFile {
    pub cluster: ClusterProfile,
    /// Every `# key=value` line, including the specular fields.
    pub metadata: BTreeMap<String, String>,
}

impl RayFile {
    pub fn meta_f64(&self, key: &str) -> Option<f64> {
        self.metadata.get(key).and_then(|v| v.parse().ok())
    }
}

pub fn read_ray_file(path: &Path) -> Result<RayFile> {
    let text = std::fs::read_to_string(path)?;
    parse_ray_csv(&text, &path.display().to_string())
}

#[derive(Clone, Copy)]
enum AmplitudeColumn {
    Amplitude,
    PowerDbm,
}

pub fn parse_ray_csv(text: &str, source: &str) -> Result<RayFile> {
    let err = |line: usize, msg: String| Error::Parse {
        path: source.to_string(),
        line,
        msg,
    };
    let mut metadata = BTreeMap::new();
    let mut header: Option<AmplitudeColumn> = None;
    let mut rays = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                metadata.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let Some(column) = header else {
            header = Some(match fields.as_slice() {
                ["offset_aoa_deg", "amplitude", "phase_rad", "delay_s"] => AmplitudeColumn::Amplitude,
                ["offset_aoa_deg", "power_dbm", "phase_rad", "delay_s"] => AmplitudeColumn::PowerDbm,
                _ => {
                    return Err(err(
                        line_no,
                        format!("expected header `offset_aoa_deg,amplitude,phase_rad,delay_s`, got `{line}`"),
                    ))
                }
            });
            continue;
        };
        if fields.len() != 4 {
            return Err(err(line_no, format!("expected 4 fields, got {}", fields.len())));
        }
        let mut values = [0.0; 4];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field
                .parse::<f64>()
                .map_err(|_| err(line_no, format!("`{field}` is not a number")))?;
        }
        let amplitude = match column {
            AmplitudeColumn::Amplitude => values[1],
            AmplitudeColumn::PowerDbm => dbm_to_mw(values[1]).sqrt(),
        };
        let ray = Ray::new(values[0], amplitude, values[2], values[3])
            .map_err(|e| err(line_no, e.to_string()))?;
        rays.push(ray);
    }
    if header.is_none() {
        return Err(err(text.lines().count().max(1), "missing CSV header".into()));
    }

    let get = |key: &str| -> Result<Option<f64>> {
        metadata
            .get(key)
            .map(|v: &String| {
                v.parse::<f64>()
                    .map_err(|_| err(0, format!("metadata `{key}` is not a number: `{v}`")))
            })
            .transpose()
    };
    let missing = |key: &str| err(0, format!("missing metadata line `# {key}=...`"));
    let aoa_deg = get("specular_aoa_deg")?.ok_or_else(|| missing("specular_aoa_deg"))?;
    let toa_s = get("specular_toa_s")?.ok_or_else(|| missing("specular_toa_s"))?;
    let amplitude = match (get("specular_amplitude")?, get("specular_power_dbm")?) {
        (Some(a), _) => a,
        (None, Some(dbm)) => dbm_to_mw(dbm).sqrt(),
        (None, None) => return Err(missing("specular_amplitude")),
    };
    let phase_rad = get("specular_phase_rad")?.unwrap_or(0.0);
    let specular = Specular {
        amplitude,
        phase_rad,
        toa_s,
        aoa_deg,
    };
    let cluster = ClusterProfile::new(specular, rays).map_err(|e| err(0, e.to_string()))?;
    Ok(RayFile { cluster, metadata })
}

/// Serialize a cluster. `extra` metadata lines go after the specular block.
pub fn write_ray_csv(cluster: &ClusterProfile, extra: &[(&str, String)]) -> String {
    let s = cluster.specular();
    let mut out = String::new();
    let _ = writeln!(out, "# specular_aoa_deg={}", s.aoa_deg);
    let _ = writeln!(out, "# specular_amplitude={}", s.amplitude);
    let _ = writeln!(out, "# specular_phase_rad={}", s.phase_rad);
    let _ = writeln!(out, "# specular_toa_s={}", s.toa_s);
    for (k, v) in extra {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str("offset_aoa_deg,amplitude,phase_rad,delay_s\n");
    for r in cluster.diffuse() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.offset_aoa_deg, r.amplitude, r.phase_rad, r.delay_s
        );
    }
    out
}
