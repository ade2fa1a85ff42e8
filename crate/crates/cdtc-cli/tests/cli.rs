use std::process::{Command, Output};

fn cdtc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdtc")).args(args).env_remove("CDTC_THREADS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("cdtc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn build_code_reports_parameters() {
    let o = cdtc(&["build-code", "--open", "--L", "6"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("# cdtc-schema 1\n# command build-code\n# config {"));
    assert!(s.contains("# params [[72,8]]"));
    assert!(s.contains("tilecode v1 open 6 6 72 8"));
}

#[test]
fn schedule_search_prints_six() {
    let o = cdtc(&["schedule-search"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("# 6 of 720 schedules are deterministic"));
    assert_eq!(s.lines().filter(|l| !l.starts_with('#')).count(), 7);
}

#[test]
fn capacity_is_byte_identical_and_replayable() {
    let args = ["capacity", "--L", "6", "--variant", "linear", "--p", "0.1,0.2", "--trials", "40", "--seed", "42"];
    let a = cdtc(&args);
    assert!(a.status.success());
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "2"]);
    let b = cdtc(&threaded);
    assert_eq!(a.stdout, b.stdout);
    let path = tmp("capacity.csv");
    std::fs::write(&path, &a.stdout).unwrap();
    let c = cdtc(&["--config", path.to_str().unwrap(), "capacity"]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn validation_errors_name_the_key() {
    let o = cdtc(&["capacity", "--L", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`seed`"));
    let path = tmp("bad.json");
    std::fs::write(&path, r#"{"trials": "lots"}"#).unwrap();
    let o = cdtc(&["--config", path.to_str().unwrap(), "capacity"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`trials`"));
    let o = cdtc(&["build-code", "--L", "6", "--variant", "zigzag"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`variant`"));
}

#[test]
fn config_from_another_command_is_rejected() {
    let path = tmp("schedules.txt");
    std::fs::write(&path, cdtc(&["schedule-search"]).stdout).unwrap();
    let o = cdtc(&["--config", path.to_str().unwrap(), "capacity"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn budget_exhaustion_flushes_partial_results() {
    let o = cdtc(&[
        "phase-sweep", "--L", "7", "--grid", "0.5:0.5,0:0", "--p", "0.3,0.35,0.4", "--samples", "1", "--trials", "5", "--seed", "1",
        "--budget", "30",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    assert!(s.contains("0.5,0.5,true"));
    assert!(s.contains("0,0,false"));
    assert!(s.trim_end().ends_with("# incomplete: budget exhausted"));
}

#[test]
fn built_circuit_runs_from_file() {
    let path = tmp("circuit.txt");
    let built = cdtc(&["circuit-build", "--L", "6", "--rounds", "2", "--variant", "linear", "--out", path.to_str().unwrap()]);
    assert!(built.status.success());
    let o = cdtc(&["circuit-run", "--circuit", path.to_str().unwrap(), "--shots", "50", "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    let row = s.lines().last().unwrap();
    assert!(row.contains(",128,") && row.contains(",50,"), "{row}");
}

#[test]
fn bounds_emit_a_json_document() {
    let o = cdtc(&["bounds", "--L", "6", "--variant", "linear", "--p", "0.01"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["result"]["blo_size"], 8);
    let path = tmp("bounds.json");
    std::fs::write(&path, &o.stdout).unwrap();
    assert_eq!(cdtc(&["--config", path.to_str().unwrap(), "bounds"]).stdout, o.stdout);
}
