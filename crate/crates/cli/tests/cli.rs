use std::fs;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::Duration;

use serde_json::Value;

const SMALL: [&str; 4] = ["--total-satellites", "10", "--interval", "300"];

fn qonstell(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qonstell")).args(args).current_dir(dir).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_spec(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

#[test]
fn simulate_writes_result_and_timesteps() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(dir.path(), "spec.json", r#"{"altitude_km": 550.0, "groups": [{"inclination_deg": 53.0, "count": 100}]}"#);
    let out = qonstell(&["simulate", "--spec", "spec.json", "--out", "r.json", "--dump-timesteps", "ts.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&dir.path().join("r.json"));
    assert!(r["mean_rate"].as_f64().unwrap() > 0.0);
    assert_eq!(r["feasible"], Value::Bool(true));
    let ts = fs::read_to_string(dir.path().join("ts.csv")).unwrap();
    assert_eq!(ts.lines().count(), 2881);
}

#[test]
fn simulate_schedule_dump() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(dir.path(), "spec.json", r#"{"altitude_km": 550.0, "groups": [{"inclination_deg": 40.0, "count": 10}]}"#);
    let mut args = vec!["simulate", "--spec", "spec.json", "--out", "r.json", "--dump-schedule", "s.csv"];
    args.extend(SMALL);
    assert!(qonstell(&args, dir.path()).status.success());
    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("t_index,sat,ga,gb,rate_pairs_per_s"));
    let total: f64 = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    let mean = json(&dir.path().join("r.json"))["mean_rate"].as_f64().unwrap();
    assert!((total / 288.0 - mean).abs() <= 1e-9 * mean.max(1.0));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(dir.path(), "broken.json", "{not json");
    write_spec(dir.path(), "short.json", r#"{"altitude_km": 550.0, "groups": [{"inclination_deg": 10.0, "count": 3}], "total": 5}"#);
    let out = qonstell(&["simulate", "--spec", "broken.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(qonstell(&["simulate", "--spec", "short.json"], dir.path()).status.code(), Some(3));
    assert_eq!(qonstell(&["export-tracks", "--spec", "short.json", "--out", "t.json"], dir.path()).status.code(), Some(3));

    write_spec(dir.path(), "two.json", r#"{"bo": {}, "ga": {}}"#);
    assert_eq!(qonstell(&["optimize", "--config", "two.json"], dir.path()).status.code(), Some(2));
    assert_eq!(qonstell(&["optimize", "--method", "bo", "--pop", "5"], dir.path()).status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_qonstell"))
        .args(["simulate", "--spec", "short.json"])
        .env("QONSTELL_THREADS", "many")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimize_is_reproducible_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["optimize", "--method", "ga", "--orbits", "2", "--budget", "40", "--seed", "9", "--out-dir", "a"];
    args.extend(SMALL);
    let out = qonstell(&args, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let manifest = json(&dir.path().join("a/manifest.json"));
    for key in ["config", "seed", "budget", "best_rate", "best_spec", "first_best_call", "wall_time_s", "completed"] {
        assert!(manifest.get(key).is_some(), "missing {key}");
    }
    assert_eq!(manifest["completed"], Value::Bool(true));
    assert_eq!(manifest["config"]["ga"]["pop_size"], 25);

    let trace = fs::read_to_string(dir.path().join("a/trace.csv")).unwrap();
    let rows: Vec<Vec<&str>> = trace.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 40);
    let best: f64 = rows.last().unwrap()[2].parse().unwrap();
    let first = rows.iter().find(|r| r[1].parse::<f64>().unwrap() == best).unwrap()[0];
    assert_eq!(manifest["first_best_call"].to_string(), first);
    assert_eq!(manifest["best_rate"].as_f64().unwrap(), best);
    assert_eq!(json(&dir.path().join("a/best_spec.json")), manifest["best_spec"]);

    let out = qonstell(&["optimize", "--from-manifest", "a/manifest.json", "--out-dir", "b"], dir.path());
    assert!(out.status.success());
    assert_eq!(fs::read(dir.path().join("a/trace.csv")).unwrap(), fs::read(dir.path().join("b/trace.csv")).unwrap());
    assert_eq!(json(&dir.path().join("b/manifest.json"))["config_hash"], manifest["config_hash"]);
}

#[test]
fn bo_run_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{
        "simulation": {"total_satellites": 10, "sample_interval_s": 600},
        "stations": {"source": "random_land", "count": 15, "seed": 1},
        "orbits": 1, "budget": 30, "seed": 2, "output_dir": "bo",
        "bo": {"init_count": 10, "acquisition": {"kind": "ei", "candidate_count": 256}}
    }"#;
    write_spec(dir.path(), "run.json", config);
    let out = qonstell(&["optimize", "--config", "run.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = fs::read_to_string(dir.path().join("bo/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 31);
    let m = json(&dir.path().join("bo/manifest.json"));
    assert_eq!(m["config"]["bo"]["seed"], 2);
    assert_eq!(m["config"]["bo"]["acquisition"]["kind"], "ei");
}

#[test]
fn interrupt_flushes_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["optimize", "--method", "bo", "--orbits", "3", "--budget", "100000", "--out-dir", "i"];
    args.extend(SMALL);
    let child = Command::new(env!("CARGO_BIN_EXE_qonstell"))
        .args(&args)
        .current_dir(dir.path())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    std::thread::sleep(Duration::from_secs(2));
    unsafe {
        libc::kill(child.id() as libc::pid_t, libc::SIGINT);
    }
    let status = child.wait_with_output().unwrap().status;
    assert_eq!(status.code(), Some(130));
    let m = json(&dir.path().join("i/manifest.json"));
    assert_eq!(m["completed"], Value::Bool(false));
    let rows = fs::read_to_string(dir.path().join("i/trace.csv")).unwrap().lines().count() - 1;
    assert!(rows > 0 && rows < 100000);
}

#[test]
fn baseline_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["baseline", "--method", "brute", "--step", "45", "--out-dir", "b"];
    args.extend(SMALL);
    assert!(qonstell(&args, dir.path()).status.success());
    let csv = fs::read_to_string(dir.path().join("b/baseline_evaluations.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let report = json(&dir.path().join("b/baseline_report.json"));
    assert_eq!(report["method"], "brute_force1d");
    let best = report["best"]["mean_rate"].as_f64().unwrap();
    assert!(report["evaluations"].as_array().unwrap().iter().all(|e| e["mean_rate"].as_f64().unwrap() <= best));

    let mut args = vec!["baseline", "--method", "equispaced", "--orbits", "3", "--out-dir", "e"];
    args.extend(SMALL);
    assert!(qonstell(&args, dir.path()).status.success());
    let spec = json(&dir.path().join("e/best_spec.json"));
    let counts: Vec<u64> = spec["groups"].as_array().unwrap().iter().map(|g| g["count"].as_u64().unwrap()).collect();
    assert_eq!(counts, vec![4, 3, 3]);
}

#[test]
fn export_tracks_geojson() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(dir.path(), "spec.json", r#"{"altitude_km": 550.0, "groups": [{"inclination_deg": 90.0, "count": 4}, {"inclination_deg": 30.0, "count": 6}]}"#);
    fs::write(dir.path().join("st.csv"), "id,lat_deg,lon_deg,alt_m\na,10,20,0\nb,-5,100,0\n").unwrap();
    let out = qonstell(&["export-tracks", "--spec", "spec.json", "--stations", "st.csv", "--out", "t.geojson"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("t.geojson"));
    let features = v["features"].as_array().unwrap();
    let lines: Vec<&Value> = features.iter().filter(|f| f["geometry"]["type"] == "LineString").collect();
    assert_eq!(lines.len(), 10);
    assert!(lines.iter().all(|f| f["geometry"]["coordinates"].as_array().unwrap().len() == 181));
    assert_eq!(features.iter().filter(|f| f["geometry"]["type"] == "Point").count(), 2);
}
