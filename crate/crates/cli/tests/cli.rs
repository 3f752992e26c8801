use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn stdg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stdg")).args(args).output().expect("binary runs")
}

fn config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL: &str = "mesh.nx = 2\nmesh.ny = 2\nspace.degree = 1\ntime.N = 2\ntime.degree = 1\noutput.fields = true\n";

#[test]
fn run_writes_summary_and_fields() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = stdg(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4, "{summary}");
    assert!(out_dir.join("fields_0002.csv").exists());
}

#[test]
fn outputs_are_byte_stable() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        assert_eq!(stdg(&["run", "--config", &cfg, "--out", d.to_str().unwrap()]).status.code(), Some(0));
    }
    for name in ["summary.csv", "fields_0001.csv", "fields_0002.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn unknown_key_reports_its_line() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "mesh.nx = 2\n# comment\nmesh.nz = 3\n");
    let out = stdg(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 3") && err.contains("mesh.nz"), "{err}");
}

#[test]
fn weight_below_threshold_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "mesh.nx = 2\nmesh.ny = 2\ntime.nu = 0.5\n");
    let out = stdg(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("coercivity condition") && err.contains("line 3"), "{err}");
}

#[test]
fn too_few_levels_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out = stdg(&["converge", "--config", &cfg, "--levels", "2"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn converge_passes_on_the_polynomial_case() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "mesh.nx = 2\nmesh.ny = 2\nspace.degree = 2\ntime.degree = 0\ntime.N = 4\ncase = polynomial\n");
    let out_dir = dir.path().join("conv");
    let out = stdg(&["converge", "--config", &cfg, "--axis", "time", "--levels", "3", "--assert-rates", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(out_dir.join("convergence_time.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4, "{csv}");
}

#[test]
fn missed_rate_exits_with_rate_code() {
    // the spatial error of a coarse mesh masks the temporal rate
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "mesh.nx = 2\nmesh.ny = 2\nspace.degree = 1\ntime.degree = 1\ntime.N = 4\n");
    let out = stdg(&["converge", "--config", &cfg, "--axis", "time", "--levels", "3", "--assert-rates", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn verify_passes_and_detects_a_flipped_correction() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let ok = stdg(&["verify", "--trials", "5", "--out", d]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(dir.path().join("verify.txt").exists());
    let bad = stdg(&["verify", "--trials", "5", "--flip-jpartial", "--out", d]);
    assert_eq!(bad.status.code(), Some(1));
}
