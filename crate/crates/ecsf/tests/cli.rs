//! End-to-end tests of the `ecsf` binary: subcommands, artifact formats,
//! exit codes, and the pipeline control cases.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ecsf"))
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

/// A circle config small enough that the whole pipeline runs in seconds.
const TINY_CIRCLE: &str = r#"{
    "seed": {"kind": "circle", "R": 1.0, "n": 96},
    "flow": {"m": 2, "a_stop_factor": 6.0},
    "blowup": {"a0_factor": 1.3, "rho": 1.25}
}"#;

#[test]
fn seed_subcommand_writes_curve_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"seed": {"n": 128}}"#);
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "--out"])
        .arg(dir.path())
        .arg("seed")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("seed.csv")).unwrap();
    assert!(csv.starts_with("s_index,x,y\n"));
    assert_eq!(csv.lines().count(), 130); // header + 129 nodes
    let json = std::fs::read_to_string(dir.path().join("seed.json")).unwrap();
    assert!(json.contains("\"arc_kind\": \"sphere_lobe\""));
}

#[test]
fn run_verify_blowup_plot_chain() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY_CIRCLE);
    let run_dir = dir.path().join("run");
    let out = bin()
        .args(["--config", cfg.to_str().unwrap()])
        .arg("run")
        .arg("--out-dir")
        .arg(&run_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let series = std::fs::read_to_string(run_dir.join("series.csv")).unwrap();
    assert!(series.starts_with("t,dt,maxA,phi_l,area,I_kp,min_p_over_r,min_kp_over_r\n"));
    let rates = std::fs::read_to_string(run_dir.join("rates.csv")).unwrap();
    assert!(rates.starts_with("t,max_k,c0,c_pi,evo_residual\n"));
    assert!(run_dir.join("summary.json").exists());
    assert!(run_dir.join("snapshots/000.csv").exists());

    // verify: all applicable verdicts pass on the control case.
    let out = bin()
        .args(["--config", cfg.to_str().unwrap()])
        .arg("verify")
        .arg(&run_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(run_dir.join("report.json").exists());
    let report = std::fs::read_to_string(run_dir.join("report.txt")).unwrap();
    assert!(report.contains("overall: PASS"));

    // blowup with explicit flags.
    let out = bin()
        .args(["--config", cfg.to_str().unwrap()])
        .arg("blowup")
        .arg(&run_dir)
        .args(["--rho", "1.2", "--a0", "1.2", "--window", "10"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(run_dir.join("fits.json").exists());
    assert!(run_dir.join("blowup.json").exists());
    assert!(run_dir.join("frames/00.csv").exists());

    // plot: three SVG documents, each well-formed.
    let out = bin()
        .args(["--config", cfg.to_str().unwrap()])
        .arg("plot")
        .arg(&run_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["snapshots.svg", "series.svg", "blowup.svg"] {
        let text = std::fs::read_to_string(run_dir.join(name)).unwrap();
        assert!(
            text.starts_with("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"),
            "{name} missing XML prologue"
        );
        assert!(text.ends_with("</svg>\n"), "{name} not closed");
    }
}

#[test]
fn pipeline_circle_control_passes_and_type_ii_assertion_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY_CIRCLE);
    let out_dir = dir.path().join("pipe");
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "--out"])
        .arg(&out_dir)
        .arg("pipeline")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = std::fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"ok\": true"));
    assert!(manifest.contains("series.csv"));
    // Column schemas are documented and versioned in the manifest.
    assert!(manifest.contains("v1:t,dt,maxA,phi_l,area,I_kp,min_p_over_r,min_kp_over_r"));

    // The same circle run with a type-II assertion must fail: a shrinking
    // circle is the type-I control case.
    let cfg2 = write_config(
        dir.path(),
        r#"{
            "seed": {"kind": "circle", "R": 1.0, "n": 96},
            "flow": {"m": 2, "a_stop_factor": 6.0},
            "blowup": {"a0_factor": 1.3, "rho": 1.25, "expect": "type_ii"}
        }"#,
    );
    let out_dir2 = dir.path().join("pipe2");
    let out = bin()
        .args(["--config", cfg2.to_str().unwrap(), "--out"])
        .arg(&out_dir2)
        .arg("pipeline")
        .output()
        .unwrap();
    assert!(!out.status.success(), "type-II assertion should fail on a circle");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dry_run_validates_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY_CIRCLE);
    let out_dir = dir.path().join("dry");
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "--out"])
        .arg(&out_dir)
        .args(["--dry-run", "pipeline"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(!out_dir.exists());
}

#[test]
fn malformed_configs_are_rejected_with_key_names() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [
        (r#"{"flow": {"cfl": 0.9}}"#, "cfl"),
        (r#"{"floww": {}}"#, "floww"),
        (r#"{"seed": {"kind": "hexagon"}}"#, "hexagon"),
        (r#"not json"#, "malformed"),
    ] {
        let cfg = write_config(dir.path(), text);
        let out = bin()
            .args(["--config", cfg.to_str().unwrap()])
            .args(["--dry-run", "pipeline"])
            .output()
            .unwrap();
        assert!(!out.status.success(), "config {text:?} should be rejected");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "error {err:?} should name {needle:?}");
    }
}

#[test]
fn run_flag_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let run_dir = dir.path().join("run");
    let out = bin()
        .arg("run")
        .args(["--seed", "circle", "--m", "3", "--n-nodes", "96"])
        .args(["--cfl", "0.3", "--a-stop", "4.0"])
        .arg("--out-dir")
        .arg(&run_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(run_dir.join("summary.json")).unwrap();
    assert!(summary.contains("\"m\": 3"));
    assert!(summary.contains("\"arc_kind\": \"closed_loop\""));
}

#[test]
fn sweep_runs_isolated_directories() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.json");
    std::fs::write(
        &sweep,
        format!("[{TINY_CIRCLE}, {TINY_CIRCLE}]"),
    )
    .unwrap();
    let out_dir = dir.path().join("sweeps");
    let out = bin()
        .arg("--out")
        .arg(&out_dir)
        .arg("pipeline")
        .arg("--sweep")
        .arg(&sweep)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("sweep_0000/manifest.json").exists());
    assert!(out_dir.join("sweep_0001/manifest.json").exists());
}
