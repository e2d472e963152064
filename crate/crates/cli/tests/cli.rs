use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn freeconv() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_freeconv"));
    c.env_remove("FREECONV_GRID_DEFAULT");
    c
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixtures() -> (TempDir, PathBuf, PathBuf) {
    let dir = TempDir::new().unwrap();
    let w = write(dir.path(), "w.json", r#"{"type":"law","name":"semicircle","params":[0,1]}"#);
    let m = write(dir.path(), "m.json", r#"{"type":"law","name":"marchenko_pastur"}"#);
    (dir, w, m)
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn help_and_version() {
    assert!(freeconv().arg("--help").output().unwrap().status.success());
    assert!(freeconv().arg("--version").output().unwrap().status.success());
}

#[test]
fn exact_moments_of_squared_semicircle() {
    let (dir, w, _) = fixtures();
    let sq = freeconv().arg("square").arg(&w).output().unwrap();
    let sq = write(dir.path(), "sq.json", &stdout(&sq));
    let v = json(&freeconv().args(["moments", "--exact", "--order", "6"]).arg(&sq).output().unwrap());
    assert_eq!(v["kind"], "moment");
    assert_eq!(v["values"], serde_json::json!(["1", "2", "5", "14", "42", "132"]));
}

#[test]
fn cumulants_csv_golden() {
    let (_dir, _, m) = fixtures();
    let o = freeconv().args(["cumulants", "--order", "3", "--out", "csv"]).arg(&m).output().unwrap();
    assert_eq!(stdout(&o), "n,free_cumulant\n1,1\n2,1\n3,1\n");
    let o = freeconv().args(["cumulants", "--kind", "boolean", "--order", "3", "--exact"]).arg(&m).output().unwrap();
    assert_eq!(json(&o)["values"], serde_json::json!(["1", "1", "2"]));
}

#[test]
fn transform_prints_twelve_digits() {
    let (_dir, w, m) = fixtures();
    let o = freeconv().args(["transform", "--which", "S", "--at", "0.1,0"]).arg(&m).output().unwrap();
    assert_eq!(stdout(&o), "0.909090909091,0\n");
    let o = freeconv().args(["transform", "--which", "G", "--at", "0,2"]).arg(&w).output().unwrap();
    // G(2i) = (2i − √(−4 − 4))/2 = i(1 − √2)
    let line = stdout(&o);
    let (_, im) = line.trim().split_once(',').unwrap();
    assert_eq!(im, "-0.414213562373");
}

#[test]
fn density_csv_and_grid_env() {
    let (_dir, w, _) = fixtures();
    let o = freeconv().args(["density", "--grid", "-1:1:3"]).arg(&w).output().unwrap();
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x,density");
    assert_eq!(lines.len(), 4);
    let centre: f64 = lines[2].split_once(',').unwrap().1.parse().unwrap();
    assert!((centre - 1.0 / std::f64::consts::PI).abs() < 1e-4, "{centre}");

    let o = freeconv().env("FREECONV_GRID_DEFAULT", "0:1:5").arg("density").arg(&w).output().unwrap();
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = freeconv().env("FREECONV_GRID_DEFAULT", "nonsense").arg("density").arg(&w).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn jobs_do_not_change_output() {
    let (dir, _, m) = fixtures();
    let mt = write(
        dir.path(),
        "mt.json",
        r#"{"type":"law","name":"marchenko_pastur","push":[{"op":"affine","scale":-1,"shift":0}]}"#,
    );
    let run = |jobs: &str| {
        let o = freeconv()
            .args(["--jobs", jobs, "convolve", "--op", "add", "--density", "--grid", "-3:3:25", "--a"])
            .arg(&m)
            .arg("--b")
            .arg(&mt)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert!(one.starts_with("x,density\n-3,"));
}

#[test]
fn exit_codes() {
    let (dir, _, _) = fixtures();
    let bad = write(dir.path(), "bad.json", r#"{"type":"atomic","atoms":[[1,0.5],[-1,0.4]]}"#);
    let o = freeconv().arg("moments").arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.9"));

    let unknown = write(dir.path(), "u.json", r#"{"type":"atomic","atoms":[[1,1]],"extra":1}"#);
    assert_eq!(freeconv().arg("moments").arg(&unknown).output().unwrap().status.code(), Some(2));
    assert_eq!(freeconv().args(["moments", "/nonexistent.json"]).output().unwrap().status.code(), Some(2));
    assert_eq!(freeconv().arg("frobnicate").output().unwrap().status.code(), Some(2));

    let zero = write(dir.path(), "z.json", r#"{"type":"atomic","atoms":[[0,1]]}"#);
    let o = freeconv().args(["convolve", "--op", "mult", "--a"]).arg(&zero).arg("--b").arg(&zero).output().unwrap();
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn regularity_and_scan() {
    let dir = TempDir::new().unwrap();
    let wp = write(dir.path(), "wp.json", r#"{"eta":2,"a":1}"#);
    let v = json(&freeconv().arg("check").arg("--regular").arg(&wp).output().unwrap());
    assert_eq!(v["free_regular"], false);
    let poisson = write(dir.path(), "p.json", r#"{"eta":1,"a":0,"levy":{"atoms":[[1,1]]}}"#);
    let v = json(&freeconv().arg("check").arg("--regular").arg(&poisson).output().unwrap());
    assert_eq!(v["free_regular"], true);

    let o = freeconv().args(["scan", "--t", "1:2:1", "--out", "csv"]).arg(&wp).output().unwrap();
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("t,left_edge,atom"));
    assert_eq!(out.lines().nth(1), Some("1,0,false"));

    let qc = write(dir.path(), "qc.json", r#"{"type":"law","name":"quarter_circle","params":[1]}"#);
    let v = json(&freeconv().arg("check").arg("--kurtosis").arg(&qc).output().unwrap());
    assert!((v["value"].as_f64().unwrap() + 0.0233443).abs() < 1e-6);
    assert_eq!(v["verdict"], "NotFid");
}

#[test]
fn factor_and_commutator() {
    let (dir, _, m) = fixtures();
    let pi = write(
        dir.path(),
        "pi.json",
        r#"{"type":"free_cumulants","values":[0,2,0,2,0,2,0,2]}"#,
    );
    let v = json(&freeconv().args(["factor-main3", "--order", "4"]).arg(&pi).output().unwrap());
    // π(2, b) with b = ½(δ₁ + δ₋₁): σ = π(2, δ₁)
    assert_eq!(v["values"], serde_json::json!([2.0, 2.0, 2.0, 2.0]));
    let v = json(&freeconv().args(["commutator", "--order", "4", "--a"]).arg(&m).arg("--b").arg(&m).output().unwrap());
    assert_eq!(v["values"][0], 0.0);
    assert_eq!(v["values"][2], 0.0);
}

#[test]
fn nc_counts() {
    assert_eq!(stdout(&freeconv().args(["nc", "--count", "10"]).output().unwrap()), "16796\n");
    assert_eq!(stdout(&freeconv().args(["nc", "--list", "3"]).output().unwrap()).lines().count(), 5);
}

#[test]
fn verify_is_deterministic() {
    let run = || freeconv().args(["verify", "--suite", "regularity", "--seed", "7"]).output().unwrap();
    let (a, b) = (run(), run());
    assert!(a.status.success(), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("freeconv verify suite=regularity seed=7\n"));
    assert_eq!(freeconv().args(["verify", "--suite", "nope"]).output().unwrap().status.code(), Some(2));
}
