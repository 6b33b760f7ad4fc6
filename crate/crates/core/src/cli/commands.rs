use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::manifest::RunManifest;
use super::scenario::{self, Overrides, Resolved, SweepRange};
use super::{Command, Common};
use crate::antenna::{check_constraints, directivity_coefficients, Sign, UpaParameterSet};
use crate::channel::{
    discretize_pas, fit_cluster, mw_to_dbm, read_ray_file, sigma_equivalent, synthesize_cluster,
    total_cluster_power, write_ray_csv,
};
use crate::error::{Error, Result};
use crate::power::{
    compare_ula_upa, max_received_power, percentile_beamwidth_at, ula_max_power, ula_received_power,
    Architecture, CaptureChannel, ChannelModel,
};

/// Designs above this many elements are flagged as impractical.
const IMPRACTICAL_ELEMENTS: u64 = 10_000;

/// One line of a beamwidth sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta_phi_deg: f64,
    pub directivity: f64,
    pub extracted_power_mw: f64,
    pub received_power_mw: f64,
    pub received_power_dbm: f64,
    pub percent_of_max: f64,
}

pub(super) fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Sweep { common, range } => sweep(&common, range.as_deref()),
        Command::Solve { common, eta } => solve(&common, eta),
        Command::Compare { common, range, eta } => compare(&common, range.as_deref(), eta),
        Command::Fit { rays, bin_width, out } => fit(&rays, bin_width, out.as_deref()),
        Command::Check { common } => check(&common),
        Command::Synth { common, seed } => synth(&common, seed),
    }
}

fn setup(common: &Common) -> Result<Resolved> {
    let (file, dir) = scenario::load(common.scenario.as_deref())?;
    let ov = Overrides {
        set: common.set.clone(),
        exact_eq13: common.exact_eq13,
    };
    scenario::resolve(&file, &dir, &ov)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_manifest(command: &str, common_scenario: Option<&Path>, outputs: Vec<PathBuf>, params: serde_json::Value) -> Result<()> {
    if let Some(primary) = outputs.first().cloned() {
        RunManifest::new(command, common_scenario, outputs, params).write_next_to(&primary)?;
    }
    Ok(())
}

fn set_json(set: &UpaParameterSet) -> serde_json::Value {
    serde_json::to_value(set).expect("set serializes")
}

fn channel_json(model: &ChannelModel, capture: &CaptureChannel) -> serde_json::Value {
    let source = match model {
        ChannelModel::Gaussian(_) => json!("gaussian"),
        ChannelModel::Fit(_) => json!("fit"),
        ChannelModel::Rays { cluster, bin_width_deg } => json!({
            "rays": cluster.n_rays(),
            "sas_deg": cluster.sas_deg(),
            "bin_width_deg": bin_width_deg,
        }),
    };
    json!({ "source": source, "capture": capture })
}

fn coefficient_note(set: &UpaParameterSet) -> Option<String> {
    if !set.has_override() {
        return None;
    }
    let used = directivity_coefficients(set).ok()?;
    let exact = directivity_coefficients(&set.exact()).ok()?;
    Some(format!(
        "note: set {} uses the printed coefficients A={}, K={}; its angles give A={:.2}, K={:.2} \
         (pass --exact-eq13 to use those)",
        set.id, used.a_coeff, used.k_coeff, exact.a_coeff, exact.k_coeff
    ))
}

fn sweep_rows(res: &Resolved, channel: &CaptureChannel, range: &SweepRange) -> Result<Vec<SweepRow>> {
    let set = &res.config.set;
    let coeffs = directivity_coefficients(set)?;
    let max = max_received_power(set, channel)?;
    range
        .points()
        .into_iter()
        .map(|dphi| {
            let directivity = coeffs.directivity(dphi)?;
            let extracted = channel.extracted_power(dphi)?;
            let received = directivity * extracted;
            Ok(SweepRow {
                delta_phi_deg: dphi,
                directivity,
                extracted_power_mw: extracted,
                received_power_mw: received,
                received_power_dbm: mw_to_dbm(received),
                percent_of_max: 100.0 * received / max,
            })
        })
        .collect()
}

fn sweep(common: &Common, range: Option<&str>) -> Result<()> {
    let mut res = setup(common)?;
    if let Some(r) = range {
        res.range = SweepRange::parse(r)?;
    }
    let channel = res.config.capture_channel()?;
    let rows = sweep_rows(&res, &channel, &res.range)?;

    let mut csv = String::from(
        "delta_phi_deg,directivity,extracted_power_mw,received_power_mw,received_power_dbm,percent_of_max\n",
    );
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.delta_phi_deg, r.directivity, r.extracted_power_mw, r.received_power_mw, r.received_power_dbm, r.percent_of_max
        );
    }
    let above = rows.iter().filter(|r| r.percent_of_max > 100.0).count();
    if above > 0 {
        eprintln!(
            "warning: {above} row(s) exceed the zero-beamwidth limit; set {} does not peak at zero beamwidth for this channel",
            res.config.set.id
        );
    }
    emit(common.out.as_deref(), &csv)?;
    if let Some(out) = &common.out {
        write_manifest(
            "sweep",
            common.scenario.as_deref(),
            vec![out.clone()],
            json!({
                "set": set_json(&res.config.set),
                "channel": channel_json(&res.config.channel, &channel),
                "range": res.range,
                "rows": rows.len(),
            }),
        )?;
    }
    Ok(())
}

fn check_etas(etas: &[f64]) -> Result<()> {
    if etas.is_empty() {
        return Err(Error::Config("no eta values given".into()));
    }
    for &e in etas {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::Config(format!("eta values must be in (0, 1), got {e}")));
        }
    }
    Ok(())
}

fn solve(common: &Common, eta: Option<Vec<f64>>) -> Result<()> {
    let mut res = setup(common)?;
    if let Some(e) = eta {
        res.etas = e;
    }
    check_etas(&res.etas)?;
    let channel = res.config.capture_channel()?;
    let set = res.config.set;
    let max = max_received_power(&set, &channel)?;

    let mut csv = String::from(
        "eta,delta_phi_deg,m_elements,n_elements,total_elements,power_mw,power_dbm,percent_of_max,status\n",
    );
    let mut report = String::new();
    let _ = writeln!(
        report,
        "set {} with {} channel: maximum received power {:.6} mW ({:.3} dBm)",
        set.id,
        channel.label(),
        max,
        mw_to_dbm(max)
    );
    let mut warnings = 0usize;
    for &eta in &res.etas {
        match percentile_beamwidth_at(&set, &channel, eta, res.config.phi0_deg) {
            Ok(s) => {
                let total = s.design.total_elements();
                let status = if total > IMPRACTICAL_ELEMENTS { "impractical" } else { "ok" };
                if total > IMPRACTICAL_ELEMENTS {
                    warnings += 1;
                }
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{}",
                    eta,
                    s.beamwidth_deg,
                    s.design.m_elements,
                    s.design.n_elements,
                    total,
                    s.received_power_mw,
                    mw_to_dbm(s.received_power_mw),
                    100.0 * s.received_power_mw / s.max_power_mw,
                    status
                );
                let _ = writeln!(
                    report,
                    "eta={eta}: delta_phi={:.4} deg  M={} N={} total={}  power={:.3} dBm{}",
                    s.beamwidth_deg,
                    s.design.m_elements,
                    s.design.n_elements,
                    total,
                    mw_to_dbm(s.received_power_mw),
                    if status == "ok" { "" } else { "  [impractical: more than 10^4 elements]" }
                );
            }
            Err(Error::NoSolution { reason, .. }) => {
                warnings += 1;
                let _ = writeln!(csv, "{eta},NaN,0,0,0,NaN,NaN,NaN,unreachable");
                let _ = writeln!(report, "eta={eta}: unreachable ({reason})");
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(note) = coefficient_note(&set) {
        let _ = writeln!(report, "{note}");
    }
    match &common.out {
        Some(out) => {
            emit(Some(out), &csv)?;
            print!("{report}");
            write_manifest(
                "solve",
                common.scenario.as_deref(),
                vec![out.clone()],
                json!({
                    "set": set_json(&set),
                    "channel": channel_json(&res.config.channel, &channel),
                    "eta": res.etas,
                    "phi0_deg": res.config.phi0_deg,
                }),
            )?;
        }
        None => {
            print!("{csv}");
            eprint!("{report}");
        }
    }
    if warnings > 0 {
        eprintln!("warning: {warnings} eta value(s) flagged");
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn compare(common: &Common, range: Option<&str>, eta: Option<Vec<f64>>) -> Result<()> {
    let mut res = setup(common)?;
    if let Some(r) = range {
        res.range = SweepRange::parse(r)?;
    }
    if let Some(e) = eta {
        res.etas = e;
    }
    check_etas(&res.etas)?;
    let channel = res.config.capture_channel()?;
    let set = res.config.set;
    let upa = sweep_rows(&res, &channel, &res.range)?;
    let ula_max = ula_max_power(&channel);

    let mut grid = String::from(
        "delta_phi_deg,upa_received_power_mw,upa_received_power_dbm,upa_percent_of_max,\
         ula_received_power_mw,ula_received_power_dbm,ula_percent_of_max\n",
    );
    for r in &upa {
        let ula = ula_received_power(&channel, r.delta_phi_deg)?;
        let _ = writeln!(
            grid,
            "{},{},{},{},{},{},{}",
            r.delta_phi_deg,
            r.received_power_mw,
            r.received_power_dbm,
            r.percent_of_max,
            ula,
            mw_to_dbm(ula),
            100.0 * ula / ula_max
        );
    }

    let cmp = compare_ula_upa(&set, &channel, &res.etas)?;
    let mut points = String::from("architecture,eta,delta_phi_deg,elements,power_mw,power_dbm,delta_db_vs_ula_max\n");
    for r in &cmp.rows {
        let _ = writeln!(
            points,
            "{},{},{},{},{},{},{}",
            r.architecture.name(),
            r.eta,
            r.beamwidth_deg,
            r.elements,
            r.power_mw,
            r.power_dbm,
            r.delta_db_vs_ula_max
        );
    }

    let mut summary = String::new();
    let _ = writeln!(summary, "upa_max_mw={:.6} ({:.3} dBm)", cmp.upa_max_mw, mw_to_dbm(cmp.upa_max_mw));
    let _ = writeln!(summary, "ula_max_mw={:.6} ({:.3} dBm)", cmp.ula_max_mw, mw_to_dbm(cmp.ula_max_mw));
    let _ = writeln!(summary, "max_gap_db={:.3} (UPA over ULA, zero-beamwidth limits)", cmp.max_gap_db);
    for r in &cmp.rows {
        let _ = writeln!(
            summary,
            "{} eta={}: delta_phi={:.3} deg, {} elements, {:.3} dBm{}",
            r.architecture.name(),
            r.eta,
            r.beamwidth_deg,
            r.elements,
            r.power_dbm,
            r.note.as_ref().map(|n| format!("  ({n})")).unwrap_or_default()
        );
    }
    let top = res.etas.iter().copied().fold(f64::MIN, f64::max);
    if let Some(ula_top) = cmp.row(Architecture::Ula, top) {
        for r in cmp.rows.iter().filter(|r| r.architecture == Architecture::Upa) {
            let _ = writeln!(
                summary,
                "UPA eta={} vs ULA eta={}: {:+.2} dB",
                r.eta,
                top,
                r.power_dbm - ula_top.power_dbm
            );
        }
    }
    if let Some(note) = coefficient_note(&set) {
        let _ = writeln!(summary, "{note}");
    }

    match &common.out {
        Some(out) => {
            let points_path = sibling(out, "_points.csv");
            emit(Some(out), &grid)?;
            emit(Some(&points_path), &points)?;
            print!("{summary}");
            write_manifest(
                "compare",
                common.scenario.as_deref(),
                vec![out.clone(), points_path],
                json!({
                    "set": set_json(&set),
                    "channel": channel_json(&res.config.channel, &channel),
                    "range": res.range,
                    "eta": res.etas,
                    "max_gap_db": cmp.max_gap_db,
                }),
            )?;
        }
        None => {
            print!("{grid}");
            eprint!("{points}{summary}");
        }
    }
    Ok(())
}

fn fit(rays: &Path, bin_width: f64, out: Option<&Path>) -> Result<()> {
    if !(bin_width > 0.0) {
        return Err(Error::Config(format!("bin width must be > 0, got {bin_width}")));
    }
    let file = read_ray_file(rays)?;
    let cluster = &file.cluster;
    let pas = discretize_pas(cluster, bin_width)?;
    let fit = fit_cluster(cluster, bin_width)?;
    let fitted = CaptureChannel::Fit(fit).full_power_mw();
    let ray_sum = total_cluster_power(cluster);

    let values: Vec<(&str, f64)> = vec![
        ("rays", cluster.n_rays() as f64),
        ("sas_deg", cluster.sas_deg()),
        ("bin_width_deg", bin_width),
        ("occupied_bins", pas.occupied_bins() as f64),
        ("u_mw_per_deg", fit.u),
        ("x_deg", fit.x_deg),
        ("v_deg", fit.v_deg),
        ("sigma_r_deg", sigma_equivalent(&fit)),
        ("fitted_power_mw", fitted),
        ("fitted_power_dbm", mw_to_dbm(fitted)),
        ("ray_sum_power_mw", ray_sum),
        ("ray_sum_power_dbm", mw_to_dbm(ray_sum)),
        ("fit_vs_ray_gap_db", mw_to_dbm(ray_sum) - mw_to_dbm(fitted)),
    ];
    let mut report = String::new();
    for (k, v) in &values {
        let _ = writeln!(report, "{k} = {v}");
    }
    print!("{report}");
    if let Some(out) = out {
        let mut csv = String::from("key,value\n");
        for (k, v) in &values {
            let _ = writeln!(csv, "{k},{v}");
        }
        emit(Some(out), &csv)?;
        write_manifest(
            "fit",
            None,
            vec![out.to_path_buf()],
            json!({ "rays": rays, "bin_width_deg": bin_width, "fit": fit }),
        )?;
    }
    Ok(())
}

fn check(common: &Common) -> Result<()> {
    let res = setup(common)?;
    let set = res.config.set;
    let r = check_constraints(&set);
    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
    let mut text = String::new();
    let _ = writeln!(
        text,
        "set {}: delta_phi_y={} deg, delta_theta={} deg, theta0={} deg",
        set.id, set.delta_phi_y_deg, set.delta_theta_deg, set.theta0_deg
    );
    let _ = writeln!(
        text,
        "C1 {}  delta_phi_y = {} deg (limit 101.5/7 = 14.5 deg)",
        verdict(r.c1_pass),
        set.delta_phi_y_deg
    );
    let _ = writeln!(
        text,
        "C2 {}  delta_phi_y^2 - delta_theta^2 cos^2(theta0) = {:.4} deg^2 (must be >= 0)",
        verdict(r.c2_pass),
        r.c2_value
    );
    let _ = writeln!(
        text,
        "C3 {}  theta0 + delta_theta/2 = {} deg (must be within 2 deg of 90)",
        verdict(r.c3_pass),
        r.c3_sum_deg
    );
    match directivity_coefficients(&set) {
        Ok(c) => {
            let (op, support) = match c.sign {
                Sign::Plus => ("+", "unbounded".to_string()),
                Sign::Minus => ("-", format!("delta_phi <= {:.4} deg", c.domain_max_deg)),
            };
            let _ = writeln!(
                text,
                "directivity: D = {:.4} pi sqrt({:.4} {op} delta_phi^2) / delta_phi, support {support}",
                c.a_coeff, c.k_coeff
            );
        }
        Err(e) => {
            let _ = writeln!(text, "directivity: {e}");
        }
    }
    if let Some(note) = coefficient_note(&set) {
        let _ = writeln!(text, "{note}");
    }
    emit(common.out.as_deref(), &text)?;
    if common.out.is_some() {
        print!("{text}");
    }
    Ok(())
}

fn synth(common: &Common, seed: Option<u64>) -> Result<()> {
    let res = setup(common)?;
    let mut cfg = res.synth.clone();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let cluster = synthesize_cluster(&cfg)?;
    let extra = vec![
        ("generator", "synthetic".to_string()),
        ("envelope", cfg.envelope.name().to_string()),
        ("peak_density_mw_per_deg", cfg.peak_density_mw_per_deg.to_string()),
        ("width_deg", cfg.width_deg.to_string()),
        ("seed", cfg.seed.to_string()),
    ];
    let csv = write_ray_csv(&cluster, &extra);
    emit(common.out.as_deref(), &csv)?;
    if let Some(out) = &common.out {
        let power = total_cluster_power(&cluster);
        println!(
            "wrote {} rays over {} deg to {} (total power {:.6e} mW, {:.3} dBm)",
            cluster.n_rays(),
            cluster.sas_deg(),
            out.display(),
            power,
            mw_to_dbm(power)
        );
        write_manifest(
            "synth",
            common.scenario.as_deref(),
            vec![out.clone()],
            serde_json::to_value(&cfg).expect("config serializes"),
        )?;
    }
    Ok(())
}
