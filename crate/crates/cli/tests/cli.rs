use std::path::Path;
use std::process::{Command, Output};

fn steklov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steklov")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn construct_reports_passing_conditions() {
    let o = steklov(&["construct", "--n", "128"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "construct");
    assert_eq!(v["config"]["params"]["alpha"], 0.75);
    let r = &v["result"];
    for c in ["condition1", "condition2", "condition3", "condition4"] {
        assert_eq!(r["conditions"][c]["pass"], true, "{c}");
    }
}

#[test]
fn bounds_row_for_small_degree() {
    let o = steklov(&["bounds", "--n", "3", "--delta", "0.5", "--mass", "1e6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,delta,mass,upper_bound,closed_form,pipeline,ratio");
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], 3.0);
    assert!((row[3] - 8f64.sqrt()).abs() < 1e-12);
    assert!((row[4] - 2.828).abs() < 1e-3);
    assert!((row[5] / row[4] - 1.0).abs() < 1e-6);
}

#[test]
fn outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        let o = steklov(&["--seed", "7", "--out", d.to_str().unwrap(), "search", "--n", "5", "--delta", "0.05", "--iters", "30", "--restarts", "2"]);
        assert!(o.status.success());
    }
    let read = |d: &Path| std::fs::read(d.join("search_n5.json")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    let v: serde_json::Value = serde_json::from_slice(&read(a.path())).unwrap();
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn out_directory_receives_artifacts() {
    let d = tempfile::tempdir().unwrap();
    let o = steklov(&["--out", d.path().to_str().unwrap(), "sweep", "--n", "128"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(d.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("n,m,value,value_over_sqrt_n,"));
    assert!(csv.lines().nth(1).unwrap().ends_with(",true"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(json["args"]["ns"][0], 128);
}

#[test]
fn invalid_configuration_exits_2() {
    let d = tempfile::tempdir().unwrap();
    let bad = d.path().join("bad.json");
    std::fs::write(&bad, r#"{"params": {"alpha": 0.75}, "bogus": 1}"#).unwrap();
    assert_eq!(steklov(&["--config", bad.to_str().unwrap(), "bounds"]).status.code(), Some(2));
    assert_eq!(steklov(&["construct", "--delta", "1.5"]).status.code(), Some(2));
    assert_eq!(steklov(&["construct", "--n", "8"]).status.code(), Some(2));
    assert_eq!(steklov(&["--alpha", "2", "construct"]).status.code(), Some(2));
    assert_eq!(steklov(&["bounds", "--delta", "0"]).status.code(), Some(2));
}

#[test]
fn unattainable_delta_exits_3() {
    let o = steklov(&["construct", "--n", "128", "--delta", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("verification failed"));
}
