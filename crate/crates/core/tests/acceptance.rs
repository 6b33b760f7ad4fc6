//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::Command;

use beamplan::antenna::{
    directivity_coefficients, solve_delta_phi_x, upa_beamwidths, UpaParameterSet, PRINTED_COEFFICIENTS,
};
use beamplan::channel::{fit_cluster, mw_to_dbm, sigma_equivalent, synthesize_cluster, GaussianPas, SynthConfig};
use beamplan::numerics::{erf, GaussianFit};
use beamplan::power::{
    compare_ula_upa, extracted_power_numeric, max_received_power, percentile_beamwidth, received_power,
    ula_percentile_beamwidth, Architecture, BeamKind, BeamPattern, CaptureChannel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn set4() -> UpaParameterSet {
    UpaParameterSet::registry(4).unwrap()
}

fn gaussian(sigma: f64) -> CaptureChannel {
    GaussianPas::new(sigma, 90.0, 1.0).unwrap().into()
}

fn case_fit() -> CaptureChannel {
    GaussianFit::new(6.434e-5, 90.0, 9.23).unwrap().into()
}

fn cli_solve() -> Result<(String, String), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("solve.csv");
    let run = Command::new(env!("CARGO_BIN_EXE_beamplan"))
        .args(["solve", "--eta", "0.95,0.5", "--out"])
        .arg(&out)
        .env("BEAMPLAN_NO_MANIFEST", "1")
        .output()
        .map_err(|e| e.to_string())?;
    if !run.status.success() {
        return Err(format!("solve exited {:?}", run.status.code()));
    }
    let csv = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    Ok((csv, String::from_utf8_lossy(&run.stdout).into_owned()))
}

fn csv_row<'a>(csv: &'a str, eta: &str) -> Option<Vec<&'a str>> {
    csv.lines().skip(1).map(|l| l.split(',').collect::<Vec<_>>()).find(|f| f[0] == eta)
}

fn c1_beamwidth_95() -> Outcome {
    let s = percentile_beamwidth(&set4(), &gaussian(5.0), 0.95).map_err(|e| e.to_string())?;
    let (csv, _) = cli_solve()?;
    let row = csv_row(&csv, "0.95").ok_or("no 0.95 row in solve output")?;
    let cli: f64 = row[1].parse().map_err(|_| "bad delta_phi field")?;
    ensure(
        (s.beamwidth_deg - 3.5).abs() <= 0.15 && (cli - s.beamwidth_deg).abs() < 1e-9,
        format!("delta_phi_95 = {:.4} deg (cli {:.4})", s.beamwidth_deg, cli),
    )
}

fn c2_elements_95() -> Outcome {
    let s = percentile_beamwidth(&set4(), &gaussian(5.0), 0.95).map_err(|e| e.to_string())?;
    let d = s.design;
    let (csv, _) = cli_solve()?;
    let row = csv_row(&csv, "0.95").ok_or("no 0.95 row in solve output")?;
    ensure(
        d.m_elements == 29 && d.n_elements == 10 && d.total_elements() == 290 && row[2..5] == ["29", "10", "290"],
        format!("M={} N={} total={}", d.m_elements, d.n_elements, d.total_elements()),
    )
}

fn c3_beamwidth_50() -> Outcome {
    let s = percentile_beamwidth(&set4(), &gaussian(5.0), 0.5).map_err(|e| e.to_string())?;
    let (csv, stdout) = cli_solve()?;
    let row = csv_row(&csv, "0.5").ok_or("no 0.5 row in solve output")?;
    let note = stdout.contains("printed coefficients A=45.9, K=190");
    ensure(
        (s.beamwidth_deg - 11.0).abs() <= 0.2 && s.design.total_elements() == 60 && row[4] == "60" && note,
        format!(
            "delta_phi_50 = {:.4} deg, total {} elements, coefficient note present: {note}",
            s.beamwidth_deg,
            s.design.total_elements()
        ),
    )
}

fn c4_max_gap() -> Outcome {
    let sigma = 5.0;
    let cmp = compare_ula_upa(&set4(), &gaussian(sigma), &[0.95, 0.5]).map_err(|e| e.to_string())?;
    let reference = 10.0 * ((793.0 / sigma) / (40.49 / sigma)).log10();
    ensure(
        (cmp.max_gap_db - reference).abs() <= 0.1 && (cmp.max_gap_db - 13.0).abs() <= 0.3,
        format!("gap = {:.3} dB (reference {:.3} dB)", cmp.max_gap_db, reference),
    )
}

fn c5_ula_95() -> Outcome {
    let s = ula_percentile_beamwidth(&gaussian(5.0), 0.95).map_err(|e| e.to_string())?;
    let cmp = compare_ula_upa(&set4(), &gaussian(5.0), &[0.95]).map_err(|e| e.to_string())?;
    let row = cmp.row(Architecture::Ula, 0.95).ok_or("no ULA row")?;
    ensure(
        (s.beamwidth_deg - 5.6).abs() <= 0.1 && s.elements == 19 && row.elements == 19,
        format!("delta_phi = {:.4} deg, {} elements", s.beamwidth_deg, s.elements),
    )
}

fn c6_model_gap() -> Outcome {
    let rt = percentile_beamwidth(&set4(), &case_fit(), 0.95).map_err(|e| e.to_string())?;
    let ad = percentile_beamwidth(&set4(), &gaussian(5.0), 0.95).map_err(|e| e.to_string())?;
    let gap = (rt.beamwidth_deg - ad.beamwidth_deg).abs();
    ensure(
        gap < 1.0 && (rt.beamwidth_deg - 3.7).abs() < 0.1,
        format!("fit {:.4} deg vs gaussian {:.4} deg, gap {gap:.4} deg", rt.beamwidth_deg, ad.beamwidth_deg),
    )
}

fn c7_table() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (i, &(a, k, sign)) in PRINTED_COEFFICIENTS.iter().enumerate().take(3) {
        let c = directivity_coefficients(&UpaParameterSet::registry(i as u32 + 1).unwrap()).unwrap();
        ok &= rel(c.a_coeff, a) < 0.01 && rel(c.k_coeff, k) < 0.01 && c.sign == sign;
        detail.push(format!("set {}: {:.3}/{:.2}", i + 1, c.a_coeff, c.k_coeff));
    }
    let exact = directivity_coefficients(&set4().exact()).unwrap();
    let printed = directivity_coefficients(&set4()).unwrap();
    ok &= rel(exact.a_coeff, 36.8) < 0.01 && printed.a_coeff == 45.9 && printed.k_coeff == 190.0;
    detail.push(format!("set 4: computed {:.3}, override {}", exact.a_coeff, printed.a_coeff));
    ensure(ok, detail.join("; "))
}

fn c8_asymptotics() -> Outcome {
    let mut worst: f64 = 0.0;
    for set in UpaParameterSet::registry_all() {
        for ch in [gaussian(5.0), case_fit()] {
            let near = received_power(&set, &ch, 1e-3).map_err(|e| e.to_string())?;
            let max = max_received_power(&set, &ch).map_err(|e| e.to_string())?;
            worst = worst.max(rel(near, max));
        }
    }
    ensure(worst < 1e-3, format!("worst relative gap {worst:.3e}"))
}

/// Alternating Maclaurin series, good to ~1e-15 for |x| <= 2.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for n in 1..200 {
        term *= -x2 / n as f64;
        let t = term / (2 * n + 1) as f64;
        sum += t;
        if t.abs() < 1e-18 {
            break;
        }
    }
    2.0 / PI.sqrt() * sum
}

fn c9_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_q: f64 = 0.0;
    for _ in 0..1000 {
        let (ch, scale, full): (CaptureChannel, f64, f64) = if rng.gen_bool(0.5) {
            let sigma = rng.gen_range(0.5..20.0);
            let p = rng.gen_range(1e-3..10.0);
            (GaussianPas::new(sigma, rng.gen_range(0.0..360.0), p).unwrap().into(), 2.0 * 2f64.sqrt() * sigma, p)
        } else {
            let (u, v) = (rng.gen_range(1e-6..1e-1), rng.gen_range(0.5..20.0));
            (GaussianFit::new(u, rng.gen_range(0.0..360.0), v).unwrap().into(), 2.0 * v, u * v * PI.sqrt())
        };
        let dphi = rng.gen_range(1e-2..60.0);
        let closed = full * libm::erf(dphi / scale);
        let beam = BeamPattern::new(BeamKind::Rectangular, ch.center_deg(), dphi).unwrap();
        let numeric = extracted_power_numeric(&beam, |x| ch.density(x), 1e-13 * full)
            .map_err(|e| e.to_string())?;
        let lib = ch.extracted_power(dphi).map_err(|e| e.to_string())?;
        worst_q = worst_q.max(rel(numeric, closed)).max(rel(lib, closed));
    }

    let mut worst_rt: f64 = 0.0;
    for _ in 0..1000 {
        let dx = rng.gen_range(1.0..40.0);
        let dy = rng.gen_range(1.0..40.0);
        let theta0 = rng.gen_range(0.0..80.0);
        let phi0 = rng.gen_range(5.0..175.0);
        let (dt, dp) = upa_beamwidths(dx, dy, theta0, phi0);
        let back = solve_delta_phi_x(dt, theta0, dy, dp).map_err(|e| e.to_string())?;
        worst_rt = worst_rt.max(rel(back, dx));
    }

    let mut worst_erf: f64 = 0.0;
    for i in 0..10_000 {
        let x = -6.0 + 12.0 * i as f64 / 9_999.0;
        let got = erf(x).map_err(|e| e.to_string())?;
        let mut err = (got - libm::erf(x)).abs();
        if x.abs() <= 2.0 {
            err = err.max((got - erf_series(x)).abs());
        }
        worst_erf = worst_erf.max(err);
    }

    ensure(
        worst_q < 1e-9 && worst_rt < 1e-9 && worst_erf < 1e-12,
        format!("quadrature {worst_q:.2e}, roundtrip {worst_rt:.2e}, erf {worst_erf:.2e}"),
    )
}

fn c10_fit_pipeline() -> Outcome {
    let cfg = SynthConfig::default();
    let cluster = synthesize_cluster(&cfg).map_err(|e| e.to_string())?;
    let fit = fit_cluster(&cluster, 1.0).map_err(|e| e.to_string())?;
    let sigma_r = sigma_equivalent(&fit);
    let power_dbm = mw_to_dbm(CaptureChannel::Fit(fit).full_power_mw());
    ensure(
        rel(fit.u, 6.434e-5) < 0.01
            && (fit.x_deg - 90.0).abs() < 0.9
            && rel(fit.v_deg, 9.23) < 0.01
            && (sigma_r - 6.53).abs() <= 0.01
            && (power_dbm + 29.78).abs() <= 0.05,
        format!(
            "u={:.4e} x={:.3} v={:.4} sigma_r={:.4} power={:.3} dBm",
            fit.u, fit.x_deg, fit.v_deg, sigma_r, power_dbm
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 95% beamwidth", c1_beamwidth_95),
        ("2 element translation", c2_elements_95),
        ("3 50% point", c3_beamwidth_50),
        ("4 UPA/ULA max gap", c4_max_gap),
        ("5 ULA 95% point", c5_ula_95),
        ("6 model gap", c6_model_gap),
        ("7 coefficient table", c7_table),
        ("8 asymptotics", c8_asymptotics),
        ("9 oracle equivalence", c9_oracles),
        ("10 fit pipeline", c10_fit_pipeline),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(d) => println!("PASS criterion {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {name}: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
