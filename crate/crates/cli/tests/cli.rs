use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bellopt::dynamics::{fidelity, read_pulse_csv, write_pulse_csv};
use bellopt::optimizer::from_jsonl;
use bellopt::{PulseSequence, StateVector4, SystemModel};

fn bellopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellopt")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Value after `key = ` on the first line starting with `key`.
fn reading(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("{key} missing in {text}"));
    line.split('=').nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap()
}

const BALANCED: &str = r#"
mode = "balanced"
seed = 5

[experiment]
true_g_hz = 219.574
amplitude_scale = [0.98, 0.98, 1.0, 1.0]
distortion_tau_s = 5e-5
noise_sigma = 1e-3

[optimizer]
max_iterations = 60
"#;

#[test]
fn identical_invocations_write_identical_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, BALANCED).unwrap();
    for name in ["a", "b"] {
        stdout(&bellopt(&["optimize", "--config", p(&cfg), "--out", p(&dir.path().join(name))]));
    }
    for file in ["trace.jsonl", "summary.csv", "pulse.csv"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs");
    }
    let trace = from_jsonl(&fs::read_to_string(dir.path().join("a/trace.jsonl")).unwrap()).unwrap();
    assert_eq!(trace.len(), 60);
    assert!(trace.iter().all(|r| r.measurements == 3));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["config"]["mode"], "balanced");
    assert_eq!(manifest["results"]["ledger"]["total_measurements"], 180);
    assert_eq!(manifest["results"]["verification_measurements"], 15);

    let other = dir.path().join("c");
    stdout(&bellopt(&["optimize", "--config", p(&cfg), "--seed", "6", "--out", p(&other)]));
    assert_ne!(fs::read(other.join("trace.jsonl")).unwrap(), fs::read(dir.path().join("a/trace.jsonl")).unwrap());
}

#[test]
fn optimized_pulse_round_trips_through_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let text = stdout(&bellopt(&["optimize", "--seed", "2", "--iterations", "150", "--out", p(&out)]));
    assert!(text.contains("seed 2: model-only"), "{text}");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let j_run = manifest["results"]["final_j_model"].as_f64().unwrap();

    let pulse = read_pulse_csv(&fs::read_to_string(out.join("pulse.csv")).unwrap()).unwrap();
    let model = SystemModel::new(217.4).unwrap();
    let j_file = fidelity(&model, &pulse, &StateVector4::basis(0), &StateVector4::singlet());
    assert!((j_file - j_run).abs() < 1e-12);

    let eval = stdout(&bellopt(&["evaluate", p(&out.join("pulse.csv"))]));
    assert!((reading(&eval, "J_model") - j_run).abs() < 1e-9, "{eval}");
    assert!(!eval.contains("J_tomo"));
}

#[test]
fn evaluate_zero_pulse_with_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let pulse = dir.path().join("zero.csv");
    fs::write(&pulse, write_pulse_csv(&PulseSequence::zeros(2.3e-3, 10).unwrap())).unwrap();
    let cfg = dir.path().join("lab.toml");
    fs::write(&cfg, "[experiment]\nseed = 1\n").unwrap();
    let eval = stdout(&bellopt(&["evaluate", p(&pulse), "--config", p(&cfg)]));
    // |00⟩ is orthogonal to the singlet and stays put without controls
    assert_eq!(reading(&eval, "J_model"), 0.0);
    assert!(reading(&eval, "J_tomo").abs() < 1e-12, "{eval}");
    assert!(reading(&eval, "J_full").abs() < 1e-12, "{eval}");
    assert!(eval.starts_with("T = 2.30 ms"), "{eval}");
}

#[test]
fn tmin_with_unitary_file() {
    let dir = tempfile::tempdir().unwrap();
    let cnot = dir.path().join("cnot.txt");
    fs::write(&cnot, "1 0 0 0 0 0 0 0\n0 0 1 0 0 0 0 0\n0 0 0 0 0 0 1 0\n0 0 0 0 1 0 0 0\n").unwrap();
    let text = stdout(&bellopt(&["tmin", "--g", "217.4", "--unitary", p(&cnot)]));
    assert!(text.contains("T_min(Bell) = 2.30 ms"), "{text}");
    assert!(text.contains("(0.785398163, 0.000000000, 0.000000000)"), "{text}");
    assert!(text.contains("T_min(U) = 2.30 ms"), "{text}");
}

#[test]
fn export_writes_plot_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    stdout(&bellopt(&["optimize", "--iterations", "5", "--out", p(&out)]));
    let plot = dir.path().join("plot.csv");
    stdout(&bellopt(&["export", p(&out.join("trace.jsonl")), "--out", p(&plot)]));
    let text = fs::read_to_string(&plot).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,J_tomo,J_L,T_ms"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn seed_ranges_run_into_separate_directories() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&bellopt(&["optimize", "--seeds", "3..5", "--iterations", "20", "--out", p(dir.path())]));
    assert_eq!(text.lines().count(), 3);
    for s in 3..=5 {
        let trace = dir.path().join(format!("seed-{s}/trace.jsonl"));
        assert_eq!(from_jsonl(&fs::read_to_string(trace).unwrap()).unwrap().len(), 20);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[optimizer]\nalpha = 2.0\n").unwrap();
    let o = bellopt(&["optimize", "--config", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("optimizer.alpha"));

    fs::write(&bad, "[model]\ng_hz = 217.4\ncoupling = 1\n").unwrap();
    let o = bellopt(&["tmin", "--config", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    assert_eq!(bellopt(&["optimize", "--mode", "balanced"]).status.code(), Some(2));
    assert_eq!(bellopt(&["budget", "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(bellopt(&["evaluate", p(&dir.path().join("missing.csv"))]).status.code(), Some(2));
    assert_eq!(bellopt(&["frobnicate"]).status.code(), Some(2));

    // output path occupied by a regular file
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = bellopt(&["optimize", "--iterations", "1", "--out", p(&blocker.join("sub"))]);
    assert_eq!(o.status.code(), Some(3));
}
