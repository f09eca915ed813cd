use std::f64::consts::PI;
use std::process::Command;

use tlsim::averaging::resonance_frequency;
use tlsim::pulsecraft::{make_gaussian_pi_pulse, make_shaped_pi_pulse};
use tlsim::{DriveField, TlsParams};
use tlsim_cli::manifest::verify_manifest;
use tlsim_cli::sweep::{running_mean, sweep_frequency, sweep_phase};
use tlsim_cli::{reproduce_figure, run_scenario, CliError, ScenarioConfig, Solver, SweepSpec};

fn phases() -> Vec<f64> {
    SweepSpec::phase(64).points().unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let k = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn rwa_csv_excited_population_is_sine_squared() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::new("rwa", TlsParams::default(), DriveField::cw(1.0, 0.1), &[Solver::Rwa]);
    let r = run_scenario(&cfg, tmp.path()).unwrap();
    let csv = std::fs::read_to_string(r.dir.join("rwa_rwa.csv")).unwrap();
    for (t, n2) in column(&csv, "t").iter().zip(column(&csv, "n2")) {
        assert!((n2 - (0.1 * t).sin().powi(2)).abs() < 1e-12, "t = {t}");
    }
}

#[test]
fn empty_solver_list_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::new("x", TlsParams::default(), DriveField::cw(1.0, 0.1), &[]);
    assert!(matches!(run_scenario(&cfg, tmp.path()), Err(CliError::Config { path, .. }) if path == "solvers"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let d = make_gaussian_pi_pulse(0.3, 1.05, 0.4).unwrap();
    let cfg = ScenarioConfig::new(
        "det",
        TlsParams::dissipative(),
        d,
        &[Solver::NumericBloch, Solver::Rwa, Solver::Avg2],
    );
    let ra = run_scenario(&cfg, a.path()).unwrap();
    run_scenario(&cfg, b.path()).unwrap();
    for s in ["numeric_bloch", "rwa", "avg2"] {
        let f = format!("det_{s}.csv");
        assert_eq!(
            std::fs::read(a.path().join(&f)).unwrap(),
            std::fs::read(b.path().join(&f)).unwrap()
        );
    }
    assert!(verify_manifest(&ra.manifest).unwrap().iter().all(|c| c.ok));
}

#[test]
fn solver_grids_are_aligned() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::new(
        "grid",
        TlsParams::default(),
        DriveField::cw(1.2, 0.1),
        &[Solver::NumericFull, Solver::Rwa, Solver::Avg2, Solver::Naive],
    );
    let r = run_scenario(&cfg, tmp.path()).unwrap();
    let t0 = &r.outputs[0].times;
    assert!(r.outputs.iter().all(|o| &o.times == t0));
}

#[test]
fn fig1_numeric_and_rwa_dephase_over_time() {
    let tmp = tempfile::tempdir().unwrap();
    let rep = reproduce_figure("fig1", tmp.path()).unwrap();
    assert!(rep.files.iter().any(|f| f == "fig1.py"));
    let num = column(
        &std::fs::read_to_string(rep.dir.join("fig1_numeric_full.csv")).unwrap(),
        "n1",
    );
    let rwa = column(&std::fs::read_to_string(rep.dir.join("fig1_rwa.csv")).unwrap(), "n1");
    let t = column(&std::fs::read_to_string(rep.dir.join("fig1_rwa.csv")).unwrap(), "t");
    // Compare ripple-averaged curves; the 2ω wiggle is there from the start.
    let num = running_mean(&t, &num, PI);
    let n = num.len();
    let early = (0..n / 10).map(|k| (num[k] - rwa[k]).abs()).fold(0.0, f64::max);
    let late = (9 * n / 10..n).map(|k| (num[k] - rwa[k]).abs()).fold(0.0, f64::max);
    assert!(late > 2.0 * early, "early {early}, late {late}");
    assert!(verify_manifest(&rep.manifest).unwrap().iter().all(|c| c.ok));
}

#[test]
fn averaged_phase_sweep_is_flat_after_a_pulse() {
    let d = make_shaped_pi_pulse(0.1, 1.0, 0.0).unwrap();
    let env = d.envelope_shape().unwrap();
    // Start and stop where the envelope is below rounding.
    let (a, b) = (env.t_center - 8.5 * env.sigma0, env.t_center + 8.5 * env.sigma0);
    let cfg = ScenarioConfig::new("s", TlsParams::default(), d, &[Solver::NumericFull, Solver::Avg2]).with_span(a, b);
    let r = sweep_phase(&cfg, &phases()).unwrap();
    let avg = r.column(Solver::Avg2, |p| p.final_n1).unwrap();
    assert!(avg.iter().all(|v| (v - avg[0]).abs() < 1e-12));
    let num = r.column(Solver::NumericFull, |p| p.final_n1).unwrap();
    assert!(
        num.iter().all(|v| *v < 0.03),
        "max {}",
        num.iter().copied().fold(0.0, f64::max)
    );
}

#[test]
fn strong_resonant_pulse_is_phase_sensitive() {
    let d = make_gaussian_pi_pulse(0.5, 1.0, 0.0).unwrap();
    let cfg = ScenarioConfig::new("s", TlsParams::default(), d, &[Solver::NumericFull]);
    let f = sweep_phase(&cfg, &phases())
        .unwrap()
        .column(Solver::NumericFull, |p| p.final_n1)
        .unwrap();
    let spread = f.iter().copied().fold(f64::NEG_INFINITY, f64::max) - f.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(spread > 0.05, "spread {spread}");
}

#[test]
fn weak_drive_resonance_is_at_transition() {
    let cfg = ScenarioConfig::new(
        "w",
        TlsParams::default(),
        DriveField::cw(1.0, 0.01),
        &[Solver::NumericFull],
    );
    let step = 0.002;
    let omegas: Vec<f64> = (0..=20).map(|k| 0.98 + step * k as f64).collect();
    let r = sweep_frequency(&cfg, &omegas).unwrap();
    assert!((r.argmax_peak(Solver::NumericFull).unwrap() - 1.0).abs() <= step);
}

#[test]
fn shaped_amplitude_resonance_near_design_carrier() {
    let w0h = 0.331_662;
    let d = make_gaussian_pi_pulse(w0h, 1.1, 0.0).unwrap();
    let cfg = ScenarioConfig::new("w", TlsParams::default(), d, &[Solver::NumericFull]);
    let step = 0.05;
    let omegas: Vec<f64> = (0..=4).map(|k| 1.0 + step * k as f64).collect();
    let r = sweep_frequency(&cfg, &omegas).unwrap();
    let found = r.argmax_peak(Solver::NumericFull).unwrap();
    let target = resonance_frequency(w0h, 1.0);
    assert!((target - 1.1).abs() < 1e-6);
    assert!((found - target).abs() <= step, "argmax {found}");
}

#[test]
fn manifest_lists_every_file_and_detects_edits() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::new(
        "m",
        TlsParams::default(),
        DriveField::cw(1.0, 0.1),
        &[Solver::Rwa, Solver::Avg2],
    )
    .with_span(0.0, 10.0);
    let r = run_scenario(&cfg, tmp.path()).unwrap();
    let checks = verify_manifest(&r.manifest).unwrap();
    assert_eq!(checks.len(), 2);
    std::fs::write(r.dir.join("m_rwa.csv"), "t\n0\n").unwrap();
    let checks = verify_manifest(&r.manifest).unwrap();
    assert!(!checks[0].ok && checks[1].ok);
}

fn tlsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tlsim"))
}

#[test]
fn binary_reports_config_field_paths() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"drive": {"kind": "cw", "omega": 1.0, "amplitude_half": 0.1}, "solvers": [], "span": [0, 10]}"#,
    )
    .unwrap();
    let out = tlsim()
        .env("TLSIM_OUT", tmp.path())
        .arg("simulate")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`solvers`"));
}

#[test]
fn binary_simulate_and_check_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cw.json");
    std::fs::write(
        &cfg,
        r#"{"name": "cw", "drive": {"kind": "cw", "omega": 1.0, "amplitude_half": 0.1}, "solvers": ["numeric_full", "rwa"], "span": [0, 5]}"#,
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let st = tlsim()
        .env("TLSIM_OUT", &out_dir)
        .args(["simulate", "--solver", "rwa,avg2"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(st.success());
    assert!(out_dir.join("cw_avg2.csv").exists());
    assert!(!out_dir.join("cw_numeric_full.csv").exists());
    let st = tlsim()
        .arg("check-manifest")
        .arg(out_dir.join("cw_manifest.json"))
        .status()
        .unwrap();
    assert!(st.success());
}

#[test]
fn binary_design_pulse_prints_drive_json() {
    let out = tlsim()
        .args(["design-pulse", "chirped", "--amplitude", "0.4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let d: DriveField = serde_json::from_slice(&out.stdout).unwrap();
    assert!(d.is_chirped());
    assert!((d.envelope_area(2.0 * d.t_center().unwrap()) - PI).abs() < 1e-3);
}
