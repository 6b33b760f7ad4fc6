//! Intra-cluster channel representations in the azimuth power-angle domain.
//!
//! Two models are supported: a normally distributed power-angle spectrum
//! ([`GaussianPas`], the 60 GHz WLAN cluster model) and an explicit ray
//! cluster ([`ClusterProfile`]) that is reduced to a [`GaussianFit`] by
//! binning and least squares.

mod rayfile;
mod synth;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::numerics::GaussianFit;
use crate::numerics::fit_gaussian;

pub use rayfile::{parse_ray_csv, read_ray_file, write_ray_csv, RayFile};
pub use synth::{synthesize_cluster, Envelope, SynthConfig};

/// One diffuse ray of a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    /// Amplitude in sqrt(mW).
    pub amplitude: f64,
    pub phase_rad: f64,
    /// Delay relative to the specular time of arrival, seconds.
    pub delay_s: f64,
    /// Angle of arrival relative to the specular ray, degrees.
    pub offset_aoa_deg: f64,
}

impl Ray {
    pub fn new(offset_aoa_deg: f64, amplitude: f64, phase_rad: f64, delay_s: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::Domain(format!("ray amplitude must be >= 0, got {amplitude}")));
        }
        if !(delay_s >= 0.0 && delay_s.is_finite()) {
            return Err(Error::Domain(format!("ray delay must be >= 0, got {delay_s}")));
        }
        if !offset_aoa_deg.is_finite() || !phase_rad.is_finite() {
            return Err(Error::Domain("ray angle and phase must be finite".into()));
        }
        Ok(Self {
            amplitude,
            phase_rad,
            delay_s,
            offset_aoa_deg,
        })
    }

    pub fn power_mw(&self) -> f64 {
        self.amplitude * self.amplitude
    }
}

/// The dominant (mirror-reflection) ray of a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Specular {
    /// Amplitude in sqrt(mW).
    pub amplitude: f64,
    pub phase_rad: f64,
    /// Time of arrival, seconds.
    pub toa_s: f64,
    /// Absolute azimuth, degrees in [0, 360).
    pub aoa_deg: f64,
}

/// A specular ray plus its diffuse rays, ordered by offset angle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterProfile {
    specular: Specular,
    diffuse: Vec<Ray>,
    sas_deg: f64,
}

impl ClusterProfile {
    pub fn new(mut specular: Specular, mut diffuse: Vec<Ray>) -> Result<Self> {
        if !(specular.amplitude >= 0.0 && specular.amplitude.is_finite()) {
            return Err(Error::Domain(format!(
                "specular amplitude must be >= 0, got {}",
                specular.amplitude
            )));
        }
        if !specular.aoa_deg.is_finite() {
            return Err(Error::Domain("specular AoA must be finite".into()));
        }
        specular.aoa_deg = specular.aoa_deg.rem_euclid(360.0);
        diffuse.sort_by(|a, b| a.offset_aoa_deg.total_cmp(&b.offset_aoa_deg));
        let sas_deg = match (diffuse.first(), diffuse.last()) {
            (Some(first), Some(last)) => last.offset_aoa_deg - first.offset_aoa_deg,
            _ => 0.0,
        };
        Ok(Self {
            specular,
            diffuse,
            sas_deg,
        })
    }

    pub fn specular(&self) -> &Specular {
        &self.specular
    }

    pub fn diffuse(&self) -> &[Ray] {
        &self.diffuse
    }

    /// Supported angle spread: last minus first diffuse offset, degrees.
    pub fn sas_deg(&self) -> f64 {
        self.sas_deg
    }

    /// Number of diffuse rays.
    pub fn n_rays(&self) -> usize {
        self.diffuse.len()
    }

    /// Angular weight applied to each diffuse ray power, `S / N_r`.
    fn ray_weight(&self) -> f64 {
        if self.diffuse.is_empty() {
            0.0
        } else {
            self.sas_deg / self.diffuse.len() as f64
        }
    }
}

/// Normally distributed power-angle spectrum around a cluster AoA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPas {
    pub sigma_deg: f64,
    pub cluster_aoa_deg: f64,
    pub total_power_mw: f64,
}

impl GaussianPas {
    pub fn new(sigma_deg: f64, cluster_aoa_deg: f64, total_power_mw: f64) -> Result<Self> {
        if !(sigma_deg > 0.0 && sigma_deg.is_finite()) {
            return Err(Error::Domain(format!("sigma must be > 0, got {sigma_deg}")));
        }
        if !(total_power_mw > 0.0 && total_power_mw.is_finite()) {
            return Err(Error::Domain(format!(
                "total power must be > 0 mW, got {total_power_mw}"
            )));
        }
        if !cluster_aoa_deg.is_finite() {
            return Err(Error::Domain("cluster AoA must be finite".into()));
        }
        Ok(Self {
            sigma_deg,
            cluster_aoa_deg,
            total_power_mw,
        })
    }
}

/// Power density of the spectrum at `phi_deg`, mW/deg.
pub fn gaussian_pas_density(pas: &GaussianPas, phi_deg: f64) -> f64 {
    let s = pas.sigma_deg;
    let d = phi_deg - pas.cluster_aoa_deg;
    pas.total_power_mw / (2.0 * PI * s * s).sqrt() * (-(d * d) / (2.0 * s * s)).exp()
}

/// Total cluster power in mW: the specular power plus the diffuse powers
/// weighted by `S / N_r`. Phases are not used; the sum is over squared
/// amplitudes.
pub fn total_cluster_power(cluster: &ClusterProfile) -> f64 {
    let diffuse: f64 = cluster.diffuse.iter().map(Ray::power_mw).sum();
    cluster.specular.power_mw() + cluster.ray_weight() * diffuse
}

impl Specular {
    pub fn power_mw(&self) -> f64 {
        self.amplitude * self.amplitude
    }
}

/// Binned power-angle profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PasSamples {
    pub bin_width_deg: f64,
    /// `(bin center angle in degrees, density in mW/deg)`, ascending angle.
    pub samples: Vec<(f64, f64)>,
}

impl PasSamples {
    /// Sum of density times bin width, mW.
    pub fn total_power_mw(&self) -> f64 {
        self.samples.iter().map(|s| s.1).sum::<f64>() * self.bin_width_deg
    }

    pub fn occupied_bins(&self) -> usize {
        self.samples.iter().filter(|s| s.1 > 0.0).count()
    }
}

/// Bin ray powers into uniform angle bins centered on the specular AoA.
///
/// Bin `j` is centered at `aoa + j * w` and receives every ray whose offset
/// rounds to `j * w`. One empty bin pads each side of the occupied span.
pub fn discretize_pas(cluster: &ClusterProfile, bin_width_deg: f64) -> Result<PasSamples> {
    if !(bin_width_deg > 0.0 && bin_width_deg.is_finite()) {
        return Err(Error::Domain(format!("bin width must be > 0, got {bin_width_deg}")));
    }
    if total_cluster_power(cluster) <= 0.0 {
        return Err(Error::Degenerate("cluster carries no power".into()));
    }
    let index = |offset: f64| (offset / bin_width_deg).round() as i64;
    let (mut lo, mut hi) = (0i64, 0i64);
    if let (Some(first), Some(last)) = (cluster.diffuse.first(), cluster.diffuse.last()) {
        lo = index(first.offset_aoa_deg).min(0);
        hi = index(last.offset_aoa_deg).max(0);
    }
    lo -= 1;
    hi += 1;
    let len = (hi - lo + 1) as usize;
    if len > 10_000_000 {
        return Err(Error::Domain(format!(
            "bin width {bin_width_deg} deg gives {len} bins"
        )));
    }

    let mut power = vec![0.0; len];
    power[(-lo) as usize] += cluster.specular.power_mw();
    let weight = cluster.ray_weight();
    for ray in &cluster.diffuse {
        power[(index(ray.offset_aoa_deg) - lo) as usize] += weight * ray.power_mw();
    }
    let aoa = cluster.specular.aoa_deg;
    let samples = power
        .into_iter()
        .enumerate()
        .map(|(i, p)| (aoa + (lo + i as i64) as f64 * bin_width_deg, p / bin_width_deg))
        .collect();
    Ok(PasSamples {
        bin_width_deg,
        samples,
    })
}

/// Discretize a ray cluster and fit a Gaussian to the binned profile.
pub fn fit_cluster(cluster: &ClusterProfile, bin_width_deg: f64) -> Result<GaussianFit> {
    let pas = discretize_pas(cluster, bin_width_deg)?;
    let occupied = pas.occupied_bins();
    if occupied < 5 {
        return Err(Error::Degenerate(format!(
            "cluster occupies {occupied} bin(s) of {bin_width_deg} deg; need at least 5"
        )));
    }
    fit_gaussian(&pas.samples)
}

/// Standard deviation of the normalized fitted density, `v / sqrt(2)`.
pub fn sigma_equivalent(fit: &GaussianFit) -> f64 {
    fit.v_deg / std::f64::consts::SQRT_2
}

/// Convert mW to dBm.
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Convert dBm to mW.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn specular(amplitude: f64) -> Specular {
        Specular {
            amplitude,
            phase_rad: 0.0,
            toa_s: 0.0,
            aoa_deg: 90.0,
        }
    }

    fn ray(offset: f64, amplitude: f64) -> Ray {
        Ray::new(offset, amplitude, 0.0, 0.0).unwrap()
    }

    #[test]
    fn pas_density_values() {
        let pas = GaussianPas::new(5.0, 90.0, 1.0).unwrap();
        // Normalization constant found by quadrature, independent of the
        // closed-form prefactor.
        let shape = |phi: f64| (-(phi - 90.0f64).powi(2) / 50.0).exp();
        let norm = integrate(shape, 10.0, 170.0, 1e-14).unwrap();
        let oracle = |phi: f64| shape(phi) / norm;
        for phi in [90.0, 95.0, 85.0] {
            let d = gaussian_pas_density(&pas, phi);
            assert!((d - oracle(phi)).abs() < 1e-12, "{phi}: {d}");
        }
        assert!((gaussian_pas_density(&pas, 90.0) - 0.079_788_456).abs() < 1e-8);
        assert!((gaussian_pas_density(&pas, 95.0) - 0.048_394_145).abs() < 1e-8);
    }

    #[test]
    fn pas_normalization_over_eight_sigma() {
        for (s, p) in [(5.0, 1.0), (10.0, 3.5e-3), (0.7, 20.0)] {
            let pas = GaussianPas::new(s, 42.0, p).unwrap();
            let v = integrate(|x| gaussian_pas_density(&pas, x), 42.0 - 8.0 * s, 42.0 + 8.0 * s, 1e-13)
                .unwrap();
            assert!(((v - p) / p).abs() < 1e-9, "{v} vs {p}");
        }
    }

    #[test]
    fn invalid_pas() {
        assert!(GaussianPas::new(0.0, 90.0, 1.0).is_err());
        assert!(GaussianPas::new(5.0, 90.0, -1.0).is_err());
    }

    #[test]
    fn total_power_examples() {
        let c = ClusterProfile::new(specular(1.0), vec![]).unwrap();
        assert_eq!(total_cluster_power(&c), 1.0);
        let c = ClusterProfile::new(specular(0.0), vec![ray(1.0, 1.0), ray(-1.0, 1.0)]).unwrap();
        assert_eq!(c.sas_deg(), 2.0);
        assert_eq!(total_cluster_power(&c), 2.0);
        assert_eq!(c.diffuse()[0].offset_aoa_deg, -1.0);
    }

    #[test]
    fn invalid_rays() {
        assert!(Ray::new(0.0, -1.0, 0.0, 0.0).is_err());
        assert!(Ray::new(0.0, 1.0, 0.0, -1e-9).is_err());
        assert!(ClusterProfile::new(specular(-1.0), vec![]).is_err());
    }

    #[test]
    fn aoa_is_wrapped() {
        let mut s = specular(1.0);
        s.aoa_deg = -90.0;
        let c = ClusterProfile::new(s, vec![]).unwrap();
        assert_eq!(c.specular().aoa_deg, 270.0);
    }

    #[test]
    fn specular_only_discretization() {
        let c = ClusterProfile::new(specular(1.0), vec![]).unwrap();
        let pas = discretize_pas(&c, 1.0).unwrap();
        let nonzero: Vec<_> = pas.samples.iter().filter(|s| s.1 > 0.0).collect();
        assert_eq!(nonzero, vec![&(90.0, 1.0)]);
    }

    #[test]
    fn flat_cluster_discretization() {
        // 11 rays over 10 deg, 1 deg bins: one ray per bin.
        let rays = (0..=10).map(|k| ray(-5.0 + k as f64, 0.5)).collect();
        let c = ClusterProfile::new(specular(0.0), rays).unwrap();
        let pas = discretize_pas(&c, 1.0).unwrap();
        let oracle = total_cluster_power(&c);
        assert!((pas.total_power_mw() - oracle).abs() < 1e-12 * oracle);
        let d: Vec<f64> = pas.samples.iter().map(|s| s.1).filter(|&d| d > 0.0).collect();
        assert_eq!(d.len(), 11);
        assert!(d.iter().all(|&x| (x - d[0]).abs() < 1e-15));
        assert_eq!(pas.samples.first().unwrap().1, 0.0);
        assert_eq!(pas.samples.last().unwrap().1, 0.0);
    }

    #[test]
    fn discretization_conserves_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.gen_range(0..200);
            let rays = (0..n)
                .map(|_| ray(rng.gen_range(-60.0..60.0), rng.gen_range(0.0..1e-2)))
                .collect();
            let c = ClusterProfile::new(specular(rng.gen_range(1e-4..1e-1)), rays).unwrap();
            let pas = discretize_pas(&c, rng.gen_range(0.05..3.0)).unwrap();
            let oracle = total_cluster_power(&c);
            assert!(((pas.total_power_mw() - oracle) / oracle).abs() < 1e-12);
            for w in pas.samples.windows(2) {
                assert!(w[1].0 > w[0].0);
                assert!(((w[1].0 - w[0].0) - pas.bin_width_deg).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn empty_cluster_is_degenerate() {
        let c = ClusterProfile::new(specular(0.0), vec![]).unwrap();
        assert!(matches!(discretize_pas(&c, 1.0), Err(Error::Degenerate(_))));
        assert!(discretize_pas(&ClusterProfile::new(specular(1.0), vec![]).unwrap(), 0.0).is_err());
    }

    #[test]
    fn two_ray_cluster_cannot_be_fitted() {
        let c = ClusterProfile::new(specular(0.0), vec![ray(-1.0, 1.0), ray(1.0, 1.0)]).unwrap();
        assert!(matches!(fit_cluster(&c, 1.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sigma_equivalent_matches_second_moment() {
        for v in [9.23, std::f64::consts::SQRT_2, 10.0, 0.5] {
            let fit = GaussianFit::new(1.0, 0.0, v).unwrap();
            let lim = 12.0 * v;
            let m0 = integrate(|x| fit.density(x), -lim, lim, 1e-14).unwrap();
            let m2 = integrate(|x| x * x * fit.density(x), -lim, lim, 1e-14).unwrap();
            let sd = (m2 / m0).sqrt();
            assert!(((sigma_equivalent(&fit) - sd) / sd).abs() < 1e-6, "{v}");
        }
        let s = sigma_equivalent(&GaussianFit::new(1.0, 0.0, 9.23).unwrap());
        assert!((s - 6.527).abs() < 1e-3);
        let s = sigma_equivalent(&GaussianFit::new(1.0, 0.0, 10.0).unwrap());
        assert!((s - 7.0711).abs() < 1e-4);
    }

    #[test]
    fn dbm_conversions() {
        assert_eq!(mw_to_dbm(1.0), 0.0);
        assert!((mw_to_dbm(dbm_to_mw(-29.09)) + 29.09).abs() < 1e-12);
    }
}
