use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn jbmeans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jbmeans"))
        .args(args)
        .output()
        .expect("spawn jbmeans")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

const A_SYM: &str = r#"{"kind":"real_symmetric","n_or_d":2,"coords":[4.0,0.0,9.0]}"#;
const B_SYM: &str = r#"{"kind":"real_symmetric","n_or_d":2,"coords":[1.0,0.0,1.0]}"#;

#[test]
fn spectrum_reports_eigenvalues_and_multiplicities() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        r#"{"kind":"spin_factor","n_or_d":3,"coords":[1.0,0.0,0.0,2.0]}"#,
    );
    let out = jbmeans(&["spectrum", "--a", &a]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["eigenvalues"], serde_json::json!([3.0, -1.0]));
    assert_eq!(v["multiplicities"], serde_json::json!([1, 1]));
}

#[test]
fn geometric_mean_of_commuting_diagonals() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", A_SYM);
    let b = write(dir.path(), "b.json", B_SYM);
    // diag(4, 9) #_{1/2} I = diag(2, 3)
    for via in ["direct", "integral"] {
        let out = jbmeans(&[
            "mean",
            "--kind",
            "geometric",
            "--lambda",
            "0.5",
            "--a",
            &a,
            "--b",
            &b,
            "--via",
            via,
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let v = stdout_json(&out);
        let c: Vec<f64> = serde_json::from_value(v["coords"].clone()).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-7 && c[1].abs() < 1e-7 && (c[2] - 3.0).abs() < 1e-7);
    }
}

#[test]
fn mean_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", A_SYM);
    let b = write(dir.path(), "b.json", B_SYM);
    let out_path = dir.path().join("m.json");
    let out = jbmeans(&[
        "mean",
        "--kind",
        "arithmetic",
        "--lambda",
        "0.25",
        "--a",
        &a,
        "--b",
        &b,
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["coords"], serde_json::json!([3.25, 0.0, 7.0]));
}

#[test]
fn integral_prints_value_and_error_bound() {
    let out = jbmeans(&["integral", "--rep", "log", "--x", "10"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let value = v["value"].as_f64().unwrap();
    assert!((value - 10f64.ln()).abs() < 1e-8);
    assert!(v["error_bound"].as_f64().unwrap() >= 0.0);
    assert!(v["levels"].as_u64().unwrap() >= 3);
}

#[test]
fn probe_json_has_four_levels() {
    let out = jbmeans(&["probe", "--family", "log", "--M", "1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["levels"].as_array().unwrap().len(), 4);
    assert_eq!(v["M"], serde_json::json!(1.0));
}

#[test]
fn verify_config_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.csv");
    let cfg = write(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{"kinds":["albert"],"trials_per_check":5,"checks":["young"],"out":{:?}}}"#,
            report.to_str().unwrap()
        ),
    );
    let out = jbmeans(&[
        "verify",
        "--config",
        &cfg,
        "--format",
        "csv",
        "--lambda-grid",
        "0.5",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "check_id,kind,lambda,pass,fail,skip,worst_margin,worst_seed"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("young,albert,0.5,5,0,0,"));
}

#[test]
fn verify_exits_one_on_failures() {
    let out = jbmeans(&[
        "verify",
        "--kinds",
        "albert",
        "--checks",
        "gm_scaling",
        "--trials",
        "50",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert!(v["checks"][0]["fail"].as_u64().unwrap() > 0);
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    // missing config file
    assert_eq!(
        code(&jbmeans(&["verify", "--config", "/no/such/config.json"])),
        2
    );
    // unknown config field
    let cfg = write(dir.path(), "bad.json", r#"{"trails_per_check":3}"#);
    assert_eq!(code(&jbmeans(&["verify", "--config", &cfg])), 2);
    // unknown check and bad kind
    assert_eq!(code(&jbmeans(&["verify", "--checks", "nope"])), 2);
    assert_eq!(code(&jbmeans(&["verify", "--kinds", "octonion:3"])), 2);
    // missing element file
    let b = write(dir.path(), "b.json", B_SYM);
    assert_eq!(
        code(&jbmeans(&[
            "mean",
            "--kind",
            "harmonic",
            "--lambda",
            "0.5",
            "--a",
            "/no/a.json",
            "--b",
            &b
        ])),
        3
    );
    // indefinite input to the geometric mean
    let neg = write(
        dir.path(),
        "neg.json",
        r#"{"kind":"real_symmetric","n_or_d":2,"coords":[1.0,0.0,-1.0]}"#,
    );
    assert_eq!(
        code(&jbmeans(&[
            "mean",
            "--kind",
            "geometric",
            "--lambda",
            "0.5",
            "--a",
            &neg,
            "--b",
            &b
        ])),
        4
    );
    // negative argument to the log integral
    assert_eq!(code(&jbmeans(&["integral", "--rep", "log", "--x=-1"])), 4);
    // unwritable report path
    assert_eq!(
        code(&jbmeans(&[
            "verify",
            "--trials",
            "1",
            "--checks",
            "young",
            "--out",
            "/no/such/dir/r.json"
        ])),
        3
    );
}
