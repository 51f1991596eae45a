use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dualpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualpath")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn validate_accepts_minimal_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "h.json", r#"{"scenario":{"kind":"hydrogen_scaling"},"master_seed":1}"#);
    let o = dualpath(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("valid hydrogen_scaling config"));
}

#[test]
fn validate_rejects_missing_seed_and_bad_step() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"scenario":{"kind":"entanglement"},"sde":{"dt":-0.1,"n_steps":10,"n_paths":10}}"#,
    );
    let o = dualpath(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("master_seed"), "{err}");
    assert!(err.contains("sde.dt"), "{err}");
}

#[test]
fn validate_rejects_unknown_fields_and_kinds() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        r#"{"scenario":{"kind":"hydrogen_scaling","zz":2},"master_seed":1}"#,
        r#"{"scenario":{"kind":"no_such_thing"},"master_seed":1}"#,
        r#"not json"#,
    ] {
        let cfg = write_config(dir.path(), "x.json", body);
        assert_eq!(dualpath(&["validate", "--config", &cfg]).status.code(), Some(2), "{body}");
    }
    let missing = dir.path().join("absent.json");
    assert_eq!(dualpath(&["validate", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn hydrogen_run_writes_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "h.json", r#"{"scenario":{"kind":"hydrogen_scaling"},"master_seed":3}"#);
    let out = dir.path().join("out");
    let o = dualpath(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(&out);
    assert_eq!(r["scenario"], "hydrogen_scaling");
    assert_eq!(r["all_passed"], true);
    assert_eq!(r["measurements"]["radius"], 1.0);
    assert_eq!(r["measurements"]["energy"], -0.5);
    let checks = r["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["name"].is_string() && c["rule"].is_string() && c["passed"] == true, "{c}");
    }
    assert!(r["timing"]["wall_seconds"].as_f64().unwrap() >= 0.0);
    assert!(String::from_utf8_lossy(&o.stdout).lines().any(|l| l.starts_with("PASS radius")));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // A tolerance no finite-difference solver can meet.
    let cfg = write_config(
        dir.path(),
        "pw.json",
        r#"{"scenario":{"kind":"plane_wave_calibration","max_relative_error":1e-30},"master_seed":1}"#,
    );
    let out = dir.path().join("out");
    let o = dualpath(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert_eq!(report(&out)["all_passed"], false);
}

#[test]
fn seed_override_and_thread_count_leave_results_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "u.json", r#"{"scenario":{"kind":"uncertainty_scaling"},"master_seed":1}"#);
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = dualpath(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed-override", "99", "--threads", threads]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let mut r = report(&out);
        r.as_object_mut().unwrap().remove("timing");
        r
    };
    let a = run("a", "1");
    let b = run("b", "3");
    assert_eq!(a["master_seed"], 99);
    assert_eq!(a, b);
}
