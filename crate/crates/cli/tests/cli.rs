use std::process::{Command, Output};

fn orbitgcd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitgcd"))
        .args(args)
        .env_remove("ORBITGCD_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn backnonfin_csv_on_stdout() {
    let o = orbitgcd(&["run", "--scenario", "backnonfin", "--n", "12", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,bits,h,hY_arch,hY_gcd,hY_total,ratio");
    assert_eq!(lines.len(), 14);
    let ratio: f64 = lines[13].rsplit(',').next().unwrap().parse().unwrap();
    assert!((ratio - 0.98784).abs() < 1e-4);
    let err = stderr(&o);
    assert!(err.starts_with("orbitgcd 0.1.0 seed=3"));
    assert!(err.contains("→ 1-consistent"));
}

#[test]
fn bcz_trend_goes_to_zero() {
    let o = orbitgcd(&["run", "--scenario", "bcz", "--a", "2", "--b", "3", "--n", "40"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("→ 0-consistent"));
    assert_eq!(stdout(&o).lines().count(), 42);
}

#[test]
fn out_file_and_summary_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a2.json");
    let o = orbitgcd(&[
        "run", "--scenario", "a2", "--n", "6", "--format", "json", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("dN mode         7"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["summary"]["dN_mode"], 7);
    assert_eq!(doc["seed"], 0);
}

#[test]
fn seed_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_orbitgcd"))
        .args(["run", "--scenario", "squaring", "--n", "4"])
        .env("ORBITGCD_SEED", "99")
        .output()
        .unwrap();
    assert!(stderr(&o).starts_with("orbitgcd 0.1.0 seed=99"));
}

#[test]
fn deterministic_output() {
    let a = orbitgcd(&["run", "--scenario", "a2", "--n", "5", "--format", "json"]);
    let b = orbitgcd(&["run", "--scenario", "a2", "--n", "5", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_config_exits_1_with_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"arity":3,"map":["x0^2","x1^2","x3^2"],"ideal":["x0"],"start":[1,2,3],"n_max":3}"#,
    )
    .unwrap();
    let o = orbitgcd(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("map[2]"), "{}", stderr(&o));
    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(orbitgcd(&["run", "--config", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(orbitgcd(&["run"]).status.code(), Some(1));
    assert_eq!(orbitgcd(&["run", "--scenario", "a2", "--config", "x.json"]).status.code(), Some(1));
    assert_eq!(orbitgcd(&["run", "--scenario", "nope"]).status.code(), Some(1));
    assert_eq!(orbitgcd(&["run", "--scenario", "a2", "--a", "2"]).status.code(), Some(1));
    assert_eq!(orbitgcd(&["run", "--scenario", "a2", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(orbitgcd(&["bogus"]).status.code(), Some(1));
    assert_eq!(orbitgcd(&["--version"]).status.code(), Some(0));
}

#[test]
fn truncated_orbit_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trunc.json");
    std::fs::write(
        &path,
        r#"{"arity":3,"map":["x0*x2","x1*x2","x0^2 - x1^2"],"ideal":["x0","x1"],
            "start":[1,1,1],"n_max":5,"primes":[]}"#,
    )
    .unwrap();
    let o = orbitgcd(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).lines().count(), 2);
    assert!(stderr(&o).contains("iterate 1 is indeterminate"));
}

#[test]
fn unwritable_output_exits_3() {
    let o = orbitgcd(&["run", "--scenario", "squaring", "--n", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn degrees_modes() {
    let o = orbitgcd(&["degrees", "--mode", "monomial", "--matrix", "2,1;0,3"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let d = doc["monomial_degrees"]["degrees"].as_array().unwrap();
    assert!((d[1].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert_eq!(d[2].as_f64().unwrap(), 6.0);

    let o = orbitgcd(&["degrees", "--mode", "seq", "--map", "x0^2;x1^2;x2^2", "--n", "4"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let degs: Vec<u64> = doc["d1_sequence"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["degree"].as_u64().unwrap())
        .collect();
    assert_eq!(degs, vec![2, 4, 8, 16]);

    let o = orbitgcd(&["degrees", "--mode", "topo", "--map", "x0^2*x1;x1^3;x2^3", "--primes", "1009", "--targets", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["dn"]["mode"], 6);
}

#[test]
fn degrees_errors_exit_1() {
    assert_eq!(orbitgcd(&["degrees", "--mode", "seq", "--map", "x0^2;x1^2;2x2"]).status.code(), Some(1));
    assert_eq!(orbitgcd(&["degrees", "--mode", "monomial", "--matrix", "1,2;2,4"]).status.code(), Some(1));
    assert_eq!(orbitgcd(&["degrees", "--mode", "monomial", "--matrix", "1,x"]).status.code(), Some(1));
    assert_eq!(
        orbitgcd(&["degrees", "--mode", "topo", "--map", "x0^2;x1^2;x2^2", "--primes", "31"]).status.code(),
        Some(1)
    );
}
