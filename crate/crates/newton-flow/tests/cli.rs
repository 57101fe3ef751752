//! End-to-end tests of the binary: exit codes, artifacts, determinism.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_newton-flow"))
}

fn run(args: &[&str]) -> std::process::Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn list_potentials_exits_zero() {
    let out = run(&["list-potentials"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("l1:w="));
    assert!(text.contains("expdecay"));
    assert!(text.contains("presets:"));
}

#[test]
fn certify_preset_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "certify",
        "--preset",
        "prox-quadratic",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    for f in ["trajectory.csv", "certificate.json", "report.json"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,lambda,mu,objective,residual,x_0,v_0,z_0\n"));
}

#[test]
fn unknown_preset_exits_two() {
    let out = run(&["solve", "--preset", "nope", "--out", "/tmp/ignored"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        r#"
mode = "solve"
[problem]
phi = "zero"
psi = "zero"
schedule = "constant:c=1"
x0 = [1.0]
v0 = [0.0]
horizon = -1.0
"#,
    )
    .unwrap();
    let out = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("horizon"));
}

#[test]
fn validate_preset_ok() {
    let out = run(&["validate", "--preset", "bv-step"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn inadmissible_data_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("inadmissible.toml");
    // v0 = 5 is not a subgradient of |x| at any point
    std::fs::write(
        &cfg,
        r#"
mode = "solve"
[problem]
phi = "l1:w=1"
psi = "zero"
schedule = "constant:c=1"
x0 = [1.0]
v0 = [5.0]
horizon = 1.0
"#,
    )
    .unwrap();
    let out = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn stability_and_bv_presets_exit_zero() {
    for (mode, preset, artifact) in [
        ("stability", "stability-scalar", "theta.csv"),
        ("bv", "bv-step", "bv_levels.csv"),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&[mode, "--preset", preset, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{mode}: {:?}", out);
        assert!(dir.path().join(artifact).exists());
    }
}

#[test]
fn tolerance_flags_are_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "solve",
        "--preset",
        "prox-quadratic",
        "--rtol",
        "1e-5",
        "--atol",
        "1e-5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    let loose_steps = json["integrator_stats"]["steps"].as_u64().unwrap();

    let dir2 = tempfile::tempdir().unwrap();
    run(&["solve", "--preset", "prox-quadratic", "--out", dir2.path().to_str().unwrap()]);
    let report = std::fs::read_to_string(dir2.path().join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    let tight_steps = json["integrator_stats"]["steps"].as_u64().unwrap();
    assert!(loose_steps < tight_steps, "{loose_steps} vs {tight_steps}");
}

fn solve_to(dir: &Path) -> String {
    let out = run(&["solve", "--preset", "l1-quadratic", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::read_to_string(dir.join("trajectory.csv")).unwrap()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    assert_eq!(solve_to(d1.path()), solve_to(d2.path()));
}
