//! End-to-end runs of the binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn radialfs(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_radialfs"));
    cmd.args(args).env_remove("RADIALFS_SEED");
    if let Some(s) = seed {
        cmd.env("RADIALFS_SEED", s);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn list_names_experiments() {
    let out = radialfs(&["list"], None);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    for name in ["scaling-f-j-lambda", "bv-decay", "spherical-mean-wavelet"] {
        assert!(s.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    assert_eq!(s.lines().count(), 15);
}

#[test]
fn passing_run_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.cfg", "experiment = scaling-f-j-lambda\n");
    let dir = tmp.path().join("out");
    let out = radialfs(&["run", &cfg, "--output", dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("scaling-f-j-lambda.csv")).unwrap();
    assert!(csv.starts_with("sweep,j,lambda,norm\n"));
    assert_eq!(csv.lines().count(), 1 + 6 + 5);
    let summary = fs::read_to_string(dir.join("summary.txt")).unwrap();
    assert!(summary.contains("PASS slope in j"));
    assert!(summary.contains("[theory]"));
    assert!(dir.join("scaling-f-j-lambda-slopes.csv").exists());
    assert!(dir.join("report.json").exists());
}

#[test]
fn failing_assertion_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", "{\"experiment\": \"sequence-identities\", \"samples\": 10}");
    let out = radialfs(&["run", &cfg, "--quiet", "--output", tmp.path().join("o").to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_errors_exit_two_with_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    for (text, needle) in [
        ("experiment = nope\n", "unknown experiment"),
        ("experiment = strauss\n[params]\nbogus = 1\n", "line 3"),
        ("experiment = decay-infinity\n[witnesses]\nids =\n", "empty witness set"),
        ("experiment = decay-infinity\ngrid = uniform:h=-1\n", "grid"),
    ] {
        let cfg = write(tmp.path(), "bad.cfg", text);
        let out = radialfs(&["run", &cfg, "--output", tmp.path().join("o").to_str().unwrap()], None);
        assert_eq!(out.status.code(), Some(2), "{text}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(needle), "{text}: {err}");
    }
    let out = radialfs(&["run", tmp.path().join("missing.cfg").to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runs_are_deterministic_and_seed_overridable() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.cfg", "experiment = bv-decay\nseed = 5\nsamples = 8\n");
    let csv = |dir: &str, seed: Option<&str>, extra: &[&str]| {
        let d = tmp.path().join(dir);
        let mut args = vec!["run", cfg.as_str(), "--quiet", "--output", d.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = radialfs(&args, seed);
        assert_eq!(out.status.code(), Some(0));
        fs::read(d.join("bv-decay.csv")).unwrap()
    };
    let a = csv("a", None, &[]);
    assert_eq!(a, csv("b", None, &[]));
    assert_eq!(a, csv("c", None, &["--parallel"]));
    assert_eq!(a, csv("d", Some("5"), &[]));
    assert_ne!(a, csv("e", Some("6"), &[]));
}

#[test]
fn map_emits_raster() {
    let out = radialfs(&["map", "--region=fig2", "--rect=0,2,0,2.5", "--res=11"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("inv_p,s,label\n"));
    assert_eq!(s.lines().count(), 1 + 11 * 11);
    let out = radialfs(&["map", "--region=nowhere", "--rect=0,1,0,1"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = radialfs(&["map", "--region=fig2", "--rect=0,1,0"], None);
    assert!(!out.status.success());
}
