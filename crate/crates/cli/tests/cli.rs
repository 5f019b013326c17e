use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qmemcell"));
    c.env_remove("QMEMCELL_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn cesium_json() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../cesium.json")
        .display()
        .to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn paper_check_has_twelve_rows_and_consistent_exit_code() {
    let o = run(&["paper-check", "--config", &cesium_json(), "--format", "csv"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 12);
    let all_pass = rows.iter().all(|r| r[7] == "PASS");
    assert!(rows.iter().all(|r| r[7] == "PASS" || r[7] == "FAIL"));
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 1 }));
}

#[test]
fn paper_check_all_pass_with_cesium_json() {
    let o = run(&["paper-check", "--config", &cesium_json()]);
    let text = stdout(&o);
    assert!(!text.contains("FAIL"), "{text}");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn shifts_prints_eight_rows_per_mechanism() {
    let o = run(&["shifts", "--omega-b-hz", "3e5"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 24);
    for name in ["quadratic_zeeman", "ac_stark", "ac_zeeman"] {
        let ms: Vec<i32> = rows.iter().filter(|r| r[0] == name).map(|r| r[1].parse().unwrap()).collect();
        assert_eq!(ms, (-4..4).collect::<Vec<_>>(), "{name}");
    }
}

#[test]
fn csv_and_json_agree_to_full_precision() {
    let csv = csv_rows(&stdout(&run(&["shifts", "--format", "csv"])));
    let json: serde_json::Value = serde_json::from_str(&stdout(&run(&["shifts", "--format", "json"]))).unwrap();
    let records = json.as_array().unwrap();
    assert_eq!(records.len(), csv.len());
    for (c, j) in csv.iter().zip(records) {
        let a: f64 = c[2].parse().unwrap();
        let b = j["omega_hz"].as_f64().unwrap();
        assert!((a - b).abs() <= 1e-12 * b.abs());
    }
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn invalid_config_exits_two_and_names_the_field() {
    let dir = std::env::temp_dir().join(format!("qmemcell-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"tau_s": -1}"#).unwrap();
    let o = run(&["decoherence", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau_s"));
}

#[test]
fn environment_variable_supplies_the_config() {
    let dir = std::env::temp_dir().join(format!("qmemcell-env-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("weak.json");
    std::fs::write(&path, r#"{"omega_b_hz": 5e4}"#).unwrap();
    let with_env = bin()
        .args(["compensate", "--format", "csv"])
        .env("QMEMCELL_CONFIG", &path)
        .output()
        .unwrap();
    let with_flag = run(&["compensate", "--format", "csv", "--config", path.to_str().unwrap()]);
    let default = run(&["compensate", "--format", "csv"]);
    assert_eq!(with_env.stdout, with_flag.stdout);
    assert_ne!(with_env.stdout, default.stdout);
}

#[test]
fn memory_sim_is_byte_identical_for_a_seed() {
    let a = run(&["memory-sim", "--format", "json", "--seed", "7"]);
    let b = run(&["memory-sim", "--format", "json", "--seed", "7"]);
    let c = run(&["memory-sim", "--format", "json", "--seed", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    for key in ["scenario", "coupling", "protocol", "write", "read", "trajectory"] {
        assert!(doc.get(key).is_some(), "{key}");
    }
}

#[test]
fn sweep_rows_follow_input_order() {
    let values = ["9e5", "5e4", "3e5", "1e5", "7e5", "2e4"];
    let o = run(&["sweep", "--param", "omega_b_hz", "--values", &values.join(",")]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let got: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let want: Vec<f64> = values.iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(got, want);
    // each row equals the single-point evaluation
    let single = csv_rows(&stdout(&run(&["sweep", "--param", "omega_b_hz", "--values", "3e5"])));
    assert_eq!(rows[2], single[0]);
}

#[test]
fn sweep_rejects_unknown_keys() {
    let o = run(&["sweep", "--param", "no_such_key", "--values", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pump_reaches_the_dark_state_split() {
    let o = run(&["pump", "--steps", "20000", "--record-every", "20000"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let last = rows.last().unwrap();
    let lo: f64 = last[1].parse().unwrap();
    let hi: f64 = last[9].parse().unwrap();
    assert!((lo - 0.5).abs() < 1e-3 && (hi - 0.5).abs() < 1e-3);
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("qmemcell-out-{}.csv", std::process::id()));
    let o = run(&["decoherence", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let rows = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert!(rows.iter().any(|r| r[0] == "spin-exchange probability"));
}
