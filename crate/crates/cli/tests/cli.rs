use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk")).args(args).output().expect("binary runs")
}

fn out_arg(dir: &TempDir) -> String {
    dir.path().to_str().unwrap().to_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn lookup(rows: &[Vec<String>], key: &str) -> f64 {
    rows.iter().find(|r| r[0] == key).unwrap_or_else(|| panic!("no row {key}"))[1].parse().unwrap()
}

#[test]
fn simulate_one_step_golden() {
    let dir = TempDir::new().unwrap();
    let out = qwalk(&[
        "simulate", "--k", "2", "--unitary", "ry:0.7853981633974483", "--coin", "plus", "--steps", "1", "--out", &out_arg(&dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("pdf.csv")).unwrap();
    assert!(text.starts_with("step,site,probability\n"));
    let step1: Vec<(i64, f64)> = csv_rows(&dir.path().join("pdf.csv"))
        .into_iter()
        .filter(|r| r[0] == "1")
        .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    let want = [(-2, 0.25), (0, 0.5), (2, 0.25)];
    assert_eq!(step1.len(), 3);
    for ((s, p), (ws, wp)) in step1.iter().zip(want) {
        assert_eq!(*s, ws);
        assert!((p - wp).abs() < 1e-15);
    }
    let moments = fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    assert!(moments.starts_with("step,mean,variance\n0,0,0\n"));
}

#[test]
fn asymptotic_summary_of_worked_example() {
    let dir = TempDir::new().unwrap();
    let out = qwalk(&["asymptotic", "--k", "2", "--unitary", "ry:0.7853981633974483", "--coin", "plus", "--out", &out_arg(&dir)]);
    assert!(out.status.success());
    let poly = csv_rows(&dir.path().join("polynomial.csv"));
    assert!(lookup(&poly, "mu").abs() < 1e-12);
    assert!((lookup(&poly, "A_1") - 1.0).abs() < 1e-12);
    assert!(lookup(&poly, "alpha_1").abs() < 1e-12);
    assert_eq!(poly.len(), 3);
    let constants = csv_rows(&dir.path().join("constants.csv"));
    assert!((lookup(&constants, "sigma2") - 0.5).abs() < 1e-12);
    assert!((lookup(&constants, "C") - 1.0).abs() < 1e-12);
    assert_eq!(csv_rows(&dir.path().join("h.csv")).len(), 4096);
    let cdf = csv_rows(&dir.path().join("cdf.csv"));
    assert_eq!(cdf.last().unwrap()[1], "1");
}

#[test]
fn cavity_and_decay_outputs() {
    let dir = TempDir::new().unwrap();
    let out = qwalk(&["cavity", "--r", "0", "--tau", "0.7853981633974483", "--chi", "0", "--out", &out_arg(&dir)]);
    assert!(out.status.success());
    let coin = csv_rows(&dir.path().join("coin.csv"));
    assert!((coin[0][2].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
    let constants = csv_rows(&dir.path().join("constants.csv"));
    assert!(lookup(&constants, "C") < 1e-12);
    assert!(constants.iter().all(|r| r[0] != "Lambda"));
    assert_eq!(csv_rows(&dir.path().join("resonance.csv")).len(), 5);

    let out = qwalk(&["decay", "--chi", "0", "--gamma", "0.5", "--out", &out_arg(&dir)]);
    assert!(out.status.success());
    let scan = csv_rows(&dir.path().join("scan.csv"));
    assert_eq!(scan.len(), 101);
    assert_eq!(scan[0], vec!["0", "0.5"]);
    assert_eq!(scan[50][1], "0");
    assert_eq!(scan[100], vec!["1", "0.5"]);
}

#[test]
fn verify_passing_suite_exits_zero() {
    let dir = TempDir::new().unwrap();
    let out = qwalk(&["verify", "--suite", "worked-h,classical-oracle,decay-spread", "--out", &out_arg(&dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rows = csv_rows(&dir.path().join("verify.csv"));
    assert!(rows.iter().all(|r| r[4] == "pass"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS worked-h"));
}

#[test]
fn errors_map_to_exit_codes() {
    assert_eq!(qwalk(&["simulate", "--unitary", "ry:pi"]).status.code(), Some(2));
    assert_eq!(qwalk(&["simulate", "--unitary", "matrix:[[1,0],[1,0],[0,0],[1,0]]"]).status.code(), Some(2));
    assert_eq!(qwalk(&["teleport"]).status.code(), Some(2));
    assert_eq!(qwalk(&["simulate", "--bogus"]).status.code(), Some(2));
    assert_eq!(qwalk(&["verify", "--suite", "nope"]).status.code(), Some(2));

    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"mode": "simulate", "stepz": 3}"#).unwrap();
    assert_eq!(qwalk(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));

    // A lattice too large for the dense window is a numerical contract violation.
    let out = qwalk(&["simulate", "--k", "30", "--steps", "400", "--out", &out_arg(&dir)]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn dump_config_round_trips() {
    let dir = TempDir::new().unwrap();
    let first = qwalk(&["decay", "--chi", "0.3", "--gamma", "0.25", "--coin", "chi:0.3", "--format", "json", "--dump-config"]);
    assert!(first.status.success());
    let path = dir.path().join("cfg.json");
    fs::write(&path, &first.stdout).unwrap();
    let second = qwalk(&["--config", path.to_str().unwrap(), "--dump-config"]);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("\"mode\": \"decay\"") && text.contains("\"gamma\": 0.25"));
}

#[test]
fn outputs_are_byte_identical() {
    for format in ["csv", "json"] {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        for dir in [&a, &b] {
            let out = qwalk(&["simulate", "--k", "3", "--unitary", "rx:1.1", "--coin", "chi:0.7", "--steps", "12", "--format", format, "--out", &out_arg(dir)]);
            assert!(out.status.success());
        }
        let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap());
        }
    }
}

#[test]
fn config_file_drives_the_run() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    let out_dir = dir.path().join("out");
    fs::write(
        &cfg,
        format!(
            r#"{{"mode": "simulate", "walk": {{"k": 1, "steps": 2, "unitary": "ry:0", "coin": "diag:0.5", "initial": {{"mixed": [[0, 1.0]]}}}}, "out": {:?}, "format": "json"}}"#,
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = qwalk(&["--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("result.json")).unwrap()).unwrap();
    let pdf = doc["tables"].as_array().unwrap().iter().find(|t| t["name"] == "pdf").unwrap();
    let last: Vec<_> = pdf["rows"].as_array().unwrap().iter().filter(|r| r[0] == 2).collect();
    assert_eq!(last.len(), 3);
    assert_eq!(last[1][1], 0);
    assert!((last[1][2].as_f64().unwrap() - 0.5).abs() < 1e-15);
}
