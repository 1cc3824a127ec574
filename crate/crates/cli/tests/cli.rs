use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn odduniv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_odduniv")).args(args).env_remove("ODDUNIV_BUDGET_SECONDS").output().unwrap()
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn theta_command() {
    let out = odduniv(&["theta", "x^2+2y^2+5z^2+xz", "-B", "5"]);
    assert!(out.status.success());
    let v = &lines(&out)[0];
    assert_eq!(v["schema"], 1);
    assert_eq!(v["coeffs"], serde_json::json!([1, 2, 2, 4, 2, 4]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1 2 2 4 2 4"));

    let out = odduniv(&["theta", "x^2", "-B", "0"]);
    assert_eq!(lines(&out)[0]["coeffs"], serde_json::json!([1]));
}

#[test]
fn bad_gram_is_machine_readable() {
    let out = odduniv(&["theta", "[[2,1],[0,2]]"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(lines(&out)[0]["error"], "NotSymmetric");
}

#[test]
fn escalate_summary_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let ck = dir.path().join("ck.jsonl");
    let out = odduniv(&["escalate", "--dir", d, "--checkpoint", ck.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(lines(&out)[0]["counts"], serde_json::json!([1, 1, 4, 73]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1,1,4,73"));
    let first = std::fs::read(dir.path().join("tree.jsonl")).unwrap();
    let again = odduniv(&["escalate", "--dir", d, "--checkpoint", ck.to_str().unwrap()]);
    assert_eq!(again.stdout, out.stdout);
    assert_eq!(std::fs::read(dir.path().join("tree.jsonl")).unwrap(), first);
    let csv = std::fs::read_to_string(dir.path().join("layers.csv")).unwrap();
    assert!(csv.lines().nth(4).unwrap().starts_with("3,73,"));
}

#[test]
fn certify_methods_and_exit_codes() {
    let out = odduniv(&["certify", "x^2+xy+xw+3y^2+7z^2+7w^2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(lines(&out)[0]["method"], "1");

    let out = odduniv(&["certify", "x^2-xz+2y^2+yz-2yw+5z^2+zw+29w^2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(lines(&out)[0]["error"], "Unresolvable");
}

#[test]
fn certificate_file_for_fundamental_form() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let out = odduniv(&[
        "certify",
        "x^2+3y^2+3yz+3yw+5z^2+zw+34w^2",
        "--candidate-limit",
        "20000",
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    // A truncated candidate stream is reported as incomplete.
    assert_eq!(out.status.code(), Some(3));
    let r = &lines(&out)[0];
    assert_eq!(r["method"], "3");
    assert_eq!(r["exceptions"], serde_json::json!([]));
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    for key in ["u", "B", "beta", "A", "c1", "c2", "c_q", "c_e", "F", "provenance"] {
        assert!(!c[key].is_null(), "{key}");
    }
    assert_eq!(c["u"], 1360);
    assert_eq!(c["c_e"], "28/151");
}

#[test]
fn appendix_check_passes_and_detects_corruption() {
    let out = odduniv(&["appendix-check"]);
    assert!(out.status.success());
    let rows = lines(&out);
    assert_eq!(rows.len(), 46);
    assert!(rows.iter().all(|r| r["pass"] == true));
    assert_eq!(rows[0]["computed"], 1);

    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.txt");
    std::fs::write(&table, "x^2+2y^2 | 7\nx^2 | 3\n").unwrap();
    let out = odduniv(&["appendix-check", "--table", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let rows = lines(&out);
    assert_eq!((rows[0]["stated"].clone(), rows[0]["computed"].clone(), rows[0]["pass"].clone()), (7.into(), 5.into(), false.into()));
}

#[test]
fn critical_check_cases() {
    for (form, t) in [("x^2", 3), ("0", 1), ("x^2+2y^2", 5)] {
        let out = odduniv(&["critical-check", form, "--bound", "1000"]);
        assert!(out.status.success(), "{form}");
        let v = &lines(&out)[0];
        assert_eq!(v["truant"], t);
        assert_eq!(v["exceptions"], serde_json::json!([t]));
    }
}

#[test]
fn local_csv() {
    let out = odduniv(&["local", "x^2+y^2+z^2+w^2", "-n", "3"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,place,num,den");
    assert!(rows.contains(&"3,3,32,27"));
    // r(3) = 32 for four squares.
    assert!(rows.contains(&"3,E,32,1"));
}

fn config_of(args: &[&str], dir: &Path, env_budget: Option<&str>) -> Value {
    let path = dir.join("job.json");
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--write-config", &p]);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_odduniv"));
    cmd.args(&all).env_remove("ODDUNIV_BUDGET_SECONDS");
    if let Some(b) = env_budget {
        cmd.env("ODDUNIV_BUDGET_SECONDS", b);
    }
    assert!(cmd.output().unwrap().status.success());
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn config_round_trip_and_env_budget() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "x^2+2y^2+5z^2+xz", "--hi", "20000"];
    let cfg = config_of(&args, dir.path(), Some("77"));
    assert_eq!(cfg["budgets"]["time_seconds"], 77);
    assert_eq!(config_of(&args, dir.path(), None)["budgets"]["time_seconds"], Value::Null);
    let explicit = config_of(&["--budget-seconds", "5", "sweep", "x^2+2y^2+5z^2+xz", "--hi", "20000"], dir.path(), Some("77"));
    assert_eq!(explicit["budgets"]["time_seconds"], 5);

    let job = dir.path().join("job.json");
    let direct = odduniv(&args);
    let via = odduniv(&["run", job.to_str().unwrap()]);
    assert!(direct.status.success() && via.status.success());
    assert_eq!(direct.stdout, via.stdout);

    let reread = config_of(&["run", job.to_str().unwrap()], dir.path(), None);
    assert_eq!(reread, explicit);
}

#[test]
fn sweeps_are_deterministic() {
    let a = odduniv(&["sweep", "x^2+3y^2+6z^2+xy+2yz", "--hi", "200000", "--reformulated", "11x^2+8xy+24y^2"]);
    let b = odduniv(&["sweep", "x^2+3y^2+6z^2+xy+2yz", "--hi", "200000", "--reformulated", "11x^2+8xy+24y^2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(lines(&a)[0]["exceptions"], serde_json::json!([]));
}
