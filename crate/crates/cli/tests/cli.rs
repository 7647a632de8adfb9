use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_typen-forge"));
    c.env_remove("TYPEN_FORGE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const SUBCOMMANDS: [&str; 8] = ["series", "puiseux", "painleve", "integrate", "invariants", "flat", "metric", "verify"];

#[test]
fn help_for_every_subcommand() {
    for s in SUBCOMMANDS {
        let out = run(&[s, "--help"]);
        assert!(out.status.success(), "{s}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage: typen-forge"), "{s}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["series", "--nope"]).status.code(), Some(2));
    assert_eq!(run(&["integrate", "--ode", "xyz", "--end", "1"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    let out = bin().env("TYPEN_FORGE_THREADS", "many").args(["series", "--symbolic"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_one() {
    assert_eq!(run(&["series", "--u0", "0"]).status.code(), Some(1));
    assert_eq!(run(&["painleve", "--ode", "XEQ"]).status.code(), Some(1));
}

#[test]
fn symbolic_series() {
    let v = json(&run(&["series", "--u0=-2", "--kmax=30", "--symbolic"]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["kind"], "series");
    let polys = v["data"].as_array().unwrap();
    assert_eq!(polys.len(), 31);
    assert_eq!(polys[1]["numerator_coeffs"], serde_json::json!(["-1", "-5/3"]));
    assert_eq!(polys[1]["denom_power"], 1);
}

#[test]
fn numeric_series_and_factor() {
    let v = json(&run(&["series", "--u0=-2", "--kmax=3"]));
    assert_eq!(v["data"]["coeffs"][2], "-7/6");
    let v = json(&run(&["series", "--factor", "--kmax=12"]));
    assert!(v["data"]["entries"].as_array().unwrap().iter().all(|e| e["divisible"] == true));
    let v = json(&run(&["series", "--u0=-2", "--bound", "1/10,5/3", "--kmax=50"]));
    assert_eq!(v["data"]["ineq1_holds"], true);
    let v = json(&run(&["series", "--u0=1", "--j=-1", "--kmax=5"]));
    assert_eq!(v["data"]["coeffs"][3], "5/9");
}

#[test]
fn painleve_jeq_fails_with_indices() {
    let v = json(&run(&["painleve", "--ode=JEQ"]));
    assert_eq!(v["data"]["pass"], false);
    let text = v.to_string();
    assert!(text.contains("(-1+sqrt(57))/2") && text.contains("7/3"));
    let v = json(&run(&["painleve", "--expr", "y'' - 6*y^2 - x"]));
    assert_eq!(v["data"]["pass"], true);
}

#[test]
fn puiseux_exact_and_numeric() {
    let v = json(&run(&["puiseux", "--u0=-2", "--j0=1/3", "--lambda=-1", "--c1=1", "--n=6"]));
    assert_eq!(v["data"]["exact"][0], "-2");
    assert_eq!(v["data"]["series"]["coeffs"].as_array().unwrap().len(), 6);
}

#[test]
fn integrate_writes_csv_and_report() {
    let (csv, rep) = (tmp("g.csv"), tmp("g.json"));
    let out = run(&[
        "integrate", "--ode", "g", "--u0=-2", "--end", "50", "--out", csv.to_str().unwrap(), "--report",
        rep.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# schema_version=1 kind=trajectory\n# ode=g params=u0=-2e0,C=1e0 tol=1e-10\nw,y0,y1,top,residual\n"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(r["data"]["sandwich"]["holds"], true);
    assert!((r["data"]["fit"]["exponent"].as_f64().unwrap() - 2.0 / 3.0).abs() < 0.05);
    let out = run(&["integrate", "--ode", "jeq", "--init", "0,1,0", "--c1", "0", "--end", "0.5"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("# ode=JEQ"));
    assert_eq!(run(&["integrate", "--ode", "jeq", "--init", "0,1", "--end", "0.5"]).status.code(), Some(1));
}

#[test]
fn invariants_json_carries_epsilon() {
    let v = json(&run(&[
        "invariants", "--family", "ln", "--lambda=-1", "--c1=1", "--z-lo=0.5", "--z-hi=1.5", "--samples=3", "--format",
        "json",
    ]));
    let pts = v["data"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 3);
    assert!(pts.iter().all(|p| p["epsilon"].is_i64()));
    let out = run(&["invariants", "--family", "g-series", "--u0=-2", "--z-lo=-0.3", "--z-hi=0.3", "--samples=4"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 6);
}

#[test]
fn flat_samples() {
    let v = json(&run(&["flat", "--case", "case3", "--lambda=1", "--c2=1", "--z-lo=-1", "--z-hi=1", "--samples=5"]));
    let s = v["data"]["samples"].as_array().unwrap();
    assert_eq!(s.len(), 5);
    assert!(s.iter().all(|x| x["value"]["dj"].as_f64().unwrap() >= 0.0));
}

fn metric_run(threads: &str, grid: &str) -> Vec<u8> {
    let out = bin()
        .env("TYPEN_FORGE_THREADS", threads)
        .args(["metric", "--family", "ln", "--lambda=-1", "--c1=0", "--grid", grid])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn metric_nurowski_point_and_determinism() {
    let grid = tmp("grid.txt");
    let mut text = String::from("# x z u r\n0 1 0 0\n");
    for k in 1..30 {
        text.push_str(&format!("{} {} 0 {}\n", 0.1 * k as f64, 1.0 + 0.05 * k as f64, 0.1 * k as f64 - 1.5));
    }
    std::fs::write(&grid, text).unwrap();
    let a = metric_run("1", grid.to_str().unwrap());
    assert_eq!(a, metric_run("4", grid.to_str().unwrap()));
    let csv = String::from_utf8(a).unwrap();
    let row: Vec<f64> = csv.lines().nth(2).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!((row[14].hypot(row[15]) - 14.0 / 3.0).abs() < 1e-8);
}

#[test]
fn verify_reports_every_criterion() {
    let out = run(&["verify", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let c = v["data"]["criteria"].as_array().unwrap();
    assert!(c.len() >= 12);
    assert!(c.iter().all(|x| x["wall_seconds"].as_f64().is_some() && x["passed"].is_boolean()));
    let all = c.iter().all(|x| x["passed"] == true);
    assert_eq!(out.status.success(), all);
}
