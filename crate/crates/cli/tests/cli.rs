use std::process::{Command, Output};

fn rqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn noiseless_analytic_is_one() {
    let o = rqc(&["analytic", "--L", "4", "--T", "4", "--alpha", "0", "--p", "0", "--arch", "fc"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1.0");
}

#[test]
fn fidelity_sweep_schema() {
    let o = rqc(&["fidelity", "--L", "4", "--T", "1..3", "--alpha", "0.05", "--p", "0.01", "--trials", "20"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "model,arch,L,T,alpha,p,trials,mc_mean,mc_stderr,analytic,zscore"
    );
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[2].starts_with("original,fc,4,3,"));
}

#[test]
fn route_stats_on_a_grid() {
    let o = rqc(&["route-stats", "--arch", "grid", "--d", "2", "--side", "3", "--samples", "20"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().starts_with("grid[3x3],9,20,"), "{text}");
}

#[test]
fn bad_flags_exit_with_two() {
    assert_eq!(rqc(&["fidelity", "--L", "4", "--bogus"]).status.code(), Some(2));
    assert_eq!(rqc(&["fidelity", "--L", "4", "--p", "0.1", "--sigma", "0.1"]).status.code(), Some(2));
    assert_eq!(rqc(&["fidelity", "--L", "4", "--T", "1..3", "--alpha", "0,0.1"]).status.code(), Some(2));
    assert_eq!(rqc(&["fidelity", "--L", "5"]).status.code(), Some(2));
    assert_eq!(rqc(&["fidelity", "--L", "4", "--alpha", "x"]).status.code(), Some(2));
}

#[test]
fn out_of_range_noise_is_a_runtime_error() {
    assert_eq!(rqc(&["fidelity", "--L", "4", "--p", "0.7"]).status.code(), Some(1));
}

#[test]
fn sigma_writes_a_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let o = rqc(&["fidelity", "--L", "4", "--sigma", "0.3", "--trials", "10", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("f.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["sigma"], 0.3);
    let p = meta["p"].as_f64().unwrap();
    assert!(p > 0.0 && p < 0.5);
}

#[test]
fn same_seed_same_file() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = rqc(&[
            "brickwall", "--L", "4", "--T", "1..4", "--alpha", "0.05", "--trials", "50", "--seed", seed,
            "--format", "json", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a", "7"), run("b", "7"));
    assert_ne!(run("a", "7"), run("c", "8"));
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"L": 4, "T": [1, 2], "alpha": 0.1, "trials": 20, "arch": "line"}"#).unwrap();
    let o = rqc(&["fidelity", "--config", cfg.to_str().unwrap(), "--alpha", "0.02"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<_> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("original,line,4,1,2.0000000000000000e-2,"), "{text}");
}

#[test]
fn validate_reports_pass_and_fail() {
    let o = rqc(&["validate", "--only", "8", "--scale", "0.01"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("[PASS]"));
    let o = rqc(&["validate", "--only", "6", "--scale", "0.01"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL]"));
    assert_eq!(rqc(&["validate", "--only", "13"]).status.code(), Some(2));
}
