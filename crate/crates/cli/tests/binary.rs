//! End-to-end runs of the `twirl` binary: exit codes and written files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn twirl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twirl")).args(args).output().expect("spawn twirl")
}

fn manifest(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../manifests").join(name)
}

fn write_manifest(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn run_passing_manifest_exits_zero() {
    let out = twirl(&["run", "--config", manifest("table-04.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("theoretical"));
    assert!(text.contains("ok"));
}

#[test]
fn violated_target_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_manifest(
        dir.path(),
        "bad-target",
        r#"{"name":"bad-target","hamiltonian":"schwinger-1q","J":1,"initial":"0","rounds":[{"mode":"quarter"}],
            "seed":1,"observables":["H"],"expected":[{"observable":"H","value":5.0,"tolerance":1e-3}]}"#,
    );
    let out = twirl(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("VIOLATED"));
}

#[test]
fn invalid_manifest_exits_two_with_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_manifest(
        dir.path(),
        "broken",
        r#"{"name":"broken","hamiltonian":"schwinger-1q","J":1,"initial":"0","rounds":[{"mode":"sideways"}],"seed":1}"#,
    );
    let out = twirl(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("/rounds/0/mode"));
}

#[test]
fn run_writes_all_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = twirl(&["run", "--config", manifest("table-10.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for ext in ["txt", "csv", "json"] {
        let path = dir.path().join(format!("table-10.{ext}"));
        assert!(std::fs::metadata(&path).unwrap().len() > 0, "{}", path.display());
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("table-10.json")).unwrap()).unwrap();
    assert_eq!(json["metadata"]["name"], "table-10");
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| !["txt", "csv", "json"].iter().any(|x| e.path().extension().is_some_and(|y| y == *x)))
        .collect();
    assert!(leftovers.is_empty(), "temporary files left behind");
}

#[test]
fn output_is_byte_identical_across_processes() {
    let path = manifest("table-01-ket0.json");
    let args = ["run", "--config", path.to_str().unwrap(), "--format", "csv", "--shots", "10000"];
    let a = twirl(&args);
    let b = twirl(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn batch_runs_directory_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg");
    std::fs::create_dir(&cfg).unwrap();
    for name in ["table-04.json", "table-10.json"] {
        std::fs::copy(manifest(name), cfg.join(name)).unwrap();
    }
    let out_dir = dir.path().join("out");
    let out = twirl(&["batch", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(out_dir.join("table-04.csv").exists());
    assert!(out_dir.join("table-10.csv").exists());

    write_manifest(
        &cfg,
        "bad-target",
        r#"{"name":"bad-target","hamiltonian":"schwinger-1q","J":1,"initial":"0","rounds":[{"mode":"quarter"}],
            "seed":1,"observables":["H"],"expected":[{"observable":"H","value":5.0,"tolerance":1e-3}]}"#,
    );
    let out = twirl(&["batch", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAILED  bad-target"));
}

#[test]
fn batch_rejects_duplicate_names() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    std::fs::copy(manifest("table-04.json"), &a).unwrap();
    std::fs::copy(manifest("table-04.json"), &b).unwrap();
    let out = twirl(&["batch", "--config", a.to_str().unwrap(), "--config", b.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("more than once"));
}

#[test]
fn spectrum_and_trotter_scan_succeed() {
    let out = twirl(&["spectrum", "-n", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2.7320508"));

    let out = twirl(&["trotter-scan", "-n", "2", "--steps", "8,16,32"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("order estimate"));
}

#[test]
fn shots_flags_conflict() {
    let out = twirl(&["run", "--config", manifest("table-04.json").to_str().unwrap(), "--shots", "10", "--paper-shots"]);
    assert_eq!(out.status.code(), Some(2));
}
