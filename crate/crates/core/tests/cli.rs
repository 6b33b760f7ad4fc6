use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use beamplan::channel::read_ray_file;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_beamplan"));
    c.env_remove("BEAMPLAN_NO_MANIFEST");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture() -> PathBuf {
    manifest_dir().join("fixtures/conference_cluster.csv")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn assert_dbm_consistent(text: &str) {
    let (header, rows) = parse_csv(text);
    for (i, h) in header.iter().enumerate() {
        let Some(stem) = h.strip_suffix("_dbm") else { continue };
        let mw = column(&header, &format!("{stem}_mw"));
        for r in &rows {
            let (p, d): (f64, f64) = (r[mw].parse().unwrap(), r[i].parse().unwrap());
            if p.is_nan() {
                continue;
            }
            assert!((d - 10.0 * p.log10()).abs() < 1e-9, "{h}: {d} vs {p} mW");
        }
    }
}

#[test]
fn sweep_default_grid() {
    let o = run(&["sweep"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let (header, rows) = parse_csv(&text);
    assert_eq!(rows.len(), 131);
    let dphi = column(&header, "delta_phi_deg");
    let pct = column(&header, "percent_of_max");
    let row = rows.iter().find(|r| r[dphi] == "3.5").expect("3.5 row");
    let p: f64 = row[pct].parse().unwrap();
    assert!((p - 95.0).abs() < 1.0, "{p}");
    assert_dbm_consistent(&text);
}

#[test]
fn sweep_is_deterministic() {
    let a = run(&["sweep", "--range", "0.5:13.5:0.05"]);
    let b = run(&["sweep", "--range", "0.5:13.5:0.05"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_past_support_is_numeric_error() {
    let o = run(&["sweep", "--range", "0.5:20:0.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("constraint 2"), "{}", stderr(&o));
}

#[test]
fn sweep_set1_warns_above_max() {
    let o = run(&["sweep", "--set", "1"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
}

#[test]
fn bad_arguments_are_config_errors() {
    assert_eq!(run(&["solve", "--eta", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--range", "1:2"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--set", "9"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--scenario", "/nonexistent/x.toml"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_scenario_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.toml");
    std::fs::write(&p, "[channel]\nsigma = 5\n").unwrap();
    let o = run(&["solve", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sigma"), "{}", stderr(&o));
}

#[test]
fn solve_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve.csv");
    let o = run(&["solve", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let (header, rows) = parse_csv(&text);
    let total = column(&header, "total_elements");
    assert_eq!(rows[0][total], "290");
    assert_eq!(rows[1][total], "60");
    assert_dbm_consistent(&text);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solve.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["parameters"]["set"]["id"], 4);
    assert!(stdout(&o).contains("printed coefficients"));
}

#[test]
fn manifest_can_be_suppressed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve.csv");
    let o = bin()
        .args(["solve", "--out", out.to_str().unwrap()])
        .env("BEAMPLAN_NO_MANIFEST", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(out.exists());
    assert!(!dir.path().join("solve.csv.manifest.json").exists());
}

#[test]
fn solve_flags_impractical_and_unreachable() {
    let o = run(&["solve", "--eta", "0.9999999"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(",impractical"), "{}", stdout(&o));

    let o = run(&["solve", "--set", "1", "--eta", "0.95"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(",unreachable"), "{}", stdout(&o));
    assert!(stderr(&o).contains("warning: 1"), "{}", stderr(&o));
}

#[test]
fn exact_flag_changes_coefficients() {
    let printed = stdout(&run(&["solve", "--eta", "0.95"]));
    let exact = stdout(&run(&["solve", "--eta", "0.95", "--exact-eq13"]));
    assert_ne!(printed, exact);
}

#[test]
fn compare_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp.csv");
    let o = run(&["compare", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = stdout(&o);
    assert!(summary.contains("max_gap_db=12.919"), "{summary}");
    assert!(summary.contains("ULA eta=0.95: delta_phi=5.606 deg, 19 elements"), "{summary}");
    assert!(summary.contains("UPA eta=0.5 vs ULA eta=0.95: +10.13 dB"), "{summary}");
    assert!(summary.contains("8x8"), "{summary}");
    let grid = std::fs::read_to_string(&out).unwrap();
    assert_eq!(parse_csv(&grid).1.len(), 131);
    assert_dbm_consistent(&grid);
    let points = std::fs::read_to_string(dir.path().join("cmp_points.csv")).unwrap();
    assert_eq!(parse_csv(&points).1.len(), 4);
    assert_dbm_consistent(&points);
}

#[test]
fn check_reports_constraints() {
    let s3 = stdout(&run(&["check", "--set", "3"]));
    assert!(s3.contains("C1 PASS") && s3.contains("C2 FAIL") && s3.contains("C3 PASS"), "{s3}");
    let s1 = stdout(&run(&["check", "--set", "1"]));
    assert!(!s1.contains("FAIL"), "{s1}");
}

fn report_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

#[test]
fn fit_matches_fixture_metadata() {
    let meta = read_ray_file(&fixture()).unwrap();
    let m = |k: &str| meta.meta_f64(k).unwrap();
    let o = run(&["fit", fixture().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let tol = m("tolerance_fit_rel");
    assert!((report_value(&text, "u_mw_per_deg") / m("expected_u") - 1.0).abs() < tol);
    assert!((report_value(&text, "v_deg") / m("expected_v_deg") - 1.0).abs() < tol);
    let total = report_value(&text, "ray_sum_power_dbm");
    assert!((total - m("expected_total_power_dbm")).abs() < m("tolerance_total_db"));
}

#[test]
fn fit_rejects_malformed_csv_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(
        &p,
        "# specular_aoa_deg=90\n# specular_toa_s=0\n# specular_amplitude=0\n\
         offset_aoa_deg,amplitude,phase_rad,delay_s\n0,1e-3,0,0\n1,abc,0,0\n",
    )
    .unwrap();
    let o = run(&["fit", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.csv:6:"), "{}", stderr(&o));
}

#[test]
fn fit_too_few_rays_is_numeric_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("few.csv");
    std::fs::write(
        &p,
        "# specular_aoa_deg=90\n# specular_toa_s=0\n# specular_amplitude=0\n\
         offset_aoa_deg,amplitude,phase_rad,delay_s\n-1,1e-3,0,0\n0,2e-3,0,0\n1,1e-3,0,0\n",
    )
    .unwrap();
    assert_eq!(run(&["fit", p.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn rays_scenario_solves() {
    let scenario = manifest_dir().join("scenarios/conference_rays.toml");
    let o = run(&["solve", "--scenario", scenario.to_str().unwrap(), "--eta", "0.95"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = parse_csv(&stdout(&o));
    let d: f64 = rows[0][column(&header, "delta_phi_deg")].parse().unwrap();
    assert!((d - 3.72).abs() < 0.05, "{d}");
}

fn synth_to(dir: &Path, name: &str, seed: &str) -> Vec<u8> {
    let scenario = manifest_dir().join("scenarios/conference_rays.toml");
    let out = dir.join(name);
    let o = run(&["synth", "--scenario", scenario.to_str().unwrap(), "--seed", seed, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    std::fs::read(out).unwrap()
}

#[test]
fn synth_roundtrips_through_fit() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth_to(dir.path(), "a.csv", "3");
    let b = synth_to(dir.path(), "b.csv", "3");
    let c = synth_to(dir.path(), "c.csv", "4");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let text = stdout(&run(&["fit", dir.path().join("a.csv").to_str().unwrap()]));
    assert!((report_value(&text, "v_deg") / 9.23 - 1.0).abs() < 0.01, "{text}");
}
