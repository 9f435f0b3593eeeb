//! End-to-end tests against the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cvqrng"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn cvqrng")
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn simulate_into(dir: &Path, extra: &[&str]) {
    let dir_s = dir.to_str().unwrap();
    let mut args = vec!["simulate", "--output-dir", dir_s];
    args.extend_from_slice(extra);
    assert_exit(&run(&args), 0);
}

const WORKING_POINT: &[&str] = &["--epsilon", "0.1135", "--count", "5e4"];

#[test]
fn simulate_is_deterministic_per_seed() {
    let t = TempDir::new().unwrap();
    let (a, b, c) = (t.path().join("a"), t.path().join("b"), t.path().join("c"));
    simulate_into(&a, &[WORKING_POINT, &["--seed", "7"]].concat());
    simulate_into(&b, &[WORKING_POINT, &["--seed", "7"]].concat());
    simulate_into(&c, &[WORKING_POINT, &["--seed", "8"]].concat());
    for name in ["histogram-x.json", "capture-x.bin"] {
        let fa = std::fs::read(a.join(name)).unwrap();
        assert_eq!(fa, std::fs::read(b.join(name)).unwrap(), "{name}");
        assert_ne!(fa, std::fs::read(c.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn simulate_then_analyze_composes() {
    let t = TempDir::new().unwrap();
    simulate_into(t.path(), WORKING_POINT);
    let hist = t.path().join("histogram-x.json");
    let out = run(&[
        "analyze",
        "--histogram",
        hist.to_str().unwrap(),
        "--output-dir",
        t.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let budget: serde_json::Value =
        serde_json::from_slice(&std::fs::read(t.path().join("budget.json")).unwrap()).unwrap();
    let h = budget["shannon_entropy_bits_per_sample"].as_f64().unwrap();
    let s = budget["holevo_bound_bits_per_sample"].as_f64().unwrap();
    let r_sec = budget["r_sec_bits_per_sample"].as_f64().unwrap();
    // finite-sample numbers near the asymptotic working point
    assert!((h - 8.7180).abs() < 0.05, "h = {h}");
    assert!((s - 0.3373).abs() < 0.05, "s = {s}");
    assert!(r_sec > 8.0 && r_sec < h - s, "r_sec = {r_sec}");
    // stdout carries the same report for piping
    let stdout: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stdout["r_sec_bits_per_sample"], budget["r_sec_bits_per_sample"]);
    // manifest records resolved defaults
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(t.path().join("manifest-analyze.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["parameters"]["n_tot"].as_u64(), Some(50_000));
    assert_eq!(manifest["parameters"]["n_c"].as_u64(), Some(223));
}

#[test]
fn analyze_aborts_without_certifiable_randomness() {
    let t = TempDir::new().unwrap();
    simulate_into(t.path(), &["--qcnr-db", "-40", "--bits", "4", "--count", "5e4"]);
    let out = run(&[
        "analyze",
        "--histogram",
        t.path().join("histogram-x.json").to_str().unwrap(),
        "--output-dir",
        t.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no certifiable randomness"));
}

#[test]
fn capture_path_runs_energy_test() {
    let t = TempDir::new().unwrap();
    let dir = t.path().to_str().unwrap();
    // volts ≡ SNU (v_shot = 1) and a 0.01 V/code ADC, so the 20.48 SNU
    // range survives the code → SNU round trip
    simulate_into(t.path(), &[WORKING_POINT, &["--range", "20.48"]].concat());
    assert_exit(
        &run(&[
            "calibrate",
            "--v-elec",
            "1e-6",
            "--v-on",
            "1.000001",
            "--adc-volts-per-code",
            "0.01",
            "--output-dir",
            dir,
        ]),
        0,
    );
    let capture = t.path().join("capture-x.bin");
    let cal = t.path().join("calibration.json");
    // σ ≈ 1.06 SNU, so plenty of samples land outside 0.5 SNU
    let out = run(&[
        "analyze",
        "--capture",
        capture.to_str().unwrap(),
        "--calibration",
        cal.to_str().unwrap(),
        "--energy-bound",
        "0.5",
        "--output-dir",
        dir,
    ]);
    assert_exit(&out, 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("energy test failed"));
    // generous bound: pipeline completes
    let out = run(&[
        "analyze",
        "--capture",
        capture.to_str().unwrap(),
        "--calibration",
        cal.to_str().unwrap(),
        "--energy-bound",
        "1e6",
        "--output-dir",
        dir,
    ]);
    assert_exit(&out, 0);
}

#[test]
fn sweep_figure_writes_csv_and_sidecar() {
    let t = TempDir::new().unwrap();
    let dir = t.path().to_str().unwrap();
    let out = run(&["sweep", "--figure", "3", "--format", "csv", "--output-dir", dir]);
    assert_exit(&out, 0);
    let csv = std::fs::read_to_string(t.path().join("fig3.csv")).unwrap();
    let lines: Vec<&str> = csv.trim().lines().collect();
    assert_eq!(lines.len(), 16); // header + n = 2..=16
    assert_eq!(lines[0], "bits,h,s,r_dis");
    let first: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
    let last: f64 = lines[15].split(',').next().unwrap().parse().unwrap();
    assert_eq!(first, 2.0);
    assert_eq!(last, 16.0);
    assert!(t.path().join("fig3.params.json").exists());
}

#[test]
fn sweep_custom_spec_round_trips() {
    let t = TempDir::new().unwrap();
    let spec = t.path().join("spec.json");
    std::fs::write(
        &spec,
        serde_json::json!({
            "swept": "epsilon",
            "grid": [0.01, 0.1, 1.0]
        })
        .to_string(),
    )
    .unwrap();
    let out = run(&[
        "sweep",
        "--custom",
        spec.to_str().unwrap(),
        "--format",
        "csv",
        "--output-dir",
        t.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let csv = std::fs::read_to_string(t.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.trim().lines().count(), 4);
}

#[test]
fn extract_round_trip_is_deterministic() {
    let t = TempDir::new().unwrap();
    let dir = t.path().to_str().unwrap();
    simulate_into(t.path(), WORKING_POINT);
    let capture = t.path().join("capture-x.bin");
    let args = [
        "extract",
        "--capture",
        capture.to_str().unwrap(),
        "--r-sec",
        "8.3746",
        "--block-samples",
        "128",
        "--output-dir",
        dir,
    ];
    assert_exit(&run(&args), 0);
    let first = std::fs::read(t.path().join("extracted.bits")).unwrap();
    assert_exit(&run(&args), 0);
    assert_eq!(first, std::fs::read(t.path().join("extracted.bits")).unwrap());
    // m per block = floor(128·8.3746 − 100) = 971; 390 full blocks
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(t.path().join("manifest-extract.json")).unwrap())
            .unwrap();
    assert_eq!(
        manifest["parameters"]["output_len_bits_per_block"].as_u64(),
        Some(971)
    );
    assert_eq!(manifest["throughput"]["blocks"].as_u64(), Some(390));
    assert_eq!(first.len(), (390usize * 971).div_ceil(8));
}

#[test]
fn extract_partial_block_error_policy() {
    let t = TempDir::new().unwrap();
    simulate_into(t.path(), &["--epsilon", "0.1135", "--count", "1000"]);
    let out = run(&[
        "extract",
        "--capture",
        t.path().join("capture-x.bin").to_str().unwrap(),
        "--r-sec",
        "8.0",
        "--block-samples",
        "128",
        "--partial-block",
        "error",
        "--output-dir",
        t.path().to_str().unwrap(),
    ]);
    assert_exit(&out, 1);
}

#[test]
fn usage_and_io_errors_are_distinguished() {
    assert_exit(&run(&["frobnicate"]), 1);
    assert_exit(&run(&["simulate", "--count", "not-a-number"]), 1);
    assert_exit(&run(&["--help"]), 0);
    let t = TempDir::new().unwrap();
    assert_exit(
        &run(&[
            "analyze",
            "--histogram",
            t.path().join("missing.json").to_str().unwrap(),
            "--output-dir",
            t.path().to_str().unwrap(),
        ]),
        4,
    );
}
