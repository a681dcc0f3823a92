use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn radkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radkit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = radkit(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn bad_flag_values_are_usage_errors() {
    let sys = data("14bus.net");
    assert_eq!(
        radkit(&["solve", "--system", &sys, "--mode", "tabu"]).status.code(),
        Some(2)
    );
    assert_eq!(
        radkit(&["emit", "--system", &sys, "--formulation", "xyz"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn missing_file_is_a_domain_error() {
    let o = radkit(&["validate", "--system", "/nonexistent/x.net"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn check_radial_reports_both_answers() {
    let sys = data("33bus.net");
    let closed: Vec<String> = (1..=32).map(|k| k.to_string()).collect();
    let o = radkit(&["check-radial", "--system", &sys, "--closed", &closed.join(",")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "radial: true\n");
    let o = radkit(&["check-radial", "--system", &sys, "--open", "1,2"]);
    assert_eq!(stdout(&o), "radial: false\n");
    assert_eq!(
        radkit(&["check-radial", "--system", &sys, "--open", "38"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn emit_writes_the_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.lp");
    let o = radkit(&[
        "emit",
        "--system",
        &data("33bus.net"),
        "--formulation",
        "mcf+st",
        "--format",
        "lp",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("Minimize\n"));
    assert!(text.ends_with("End\n"));
}

#[test]
fn solve_prints_a_json_report() {
    let o = radkit(&["solve", "--system", &data("14bus.net"), "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["trees_enumerated"], 190);
    assert_eq!(v["mode"], "exact");
    assert!(v["losses_kw"].as_f64().unwrap() > 0.0);
    assert_eq!(v["open_branches"].as_array().unwrap().len(), 3);
}

#[test]
fn exact_over_budget_fails_cleanly() {
    let o = radkit(&["solve", "--system", &data("33bus.net"), "--max-trees", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("50751"));
}

#[test]
fn powerflow_defaults_to_dataset_switches() {
    let o = radkit(&["powerflow", "--system", &data("33bus.net")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["converged"].as_bool().unwrap());
    let losses = v["losses_kw"].as_f64().unwrap();
    assert!((losses - 202.68).abs() < 0.05, "{losses}");
}

#[test]
fn stats_cover_all_formulations() {
    let o = radkit(&["stats", "--system", &data("33bus.net")]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_object().unwrap().len(), 8);
    assert_eq!(v["base"]["n_binary"], 37);
}

#[test]
fn bench_renders_csv() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("bench.toml");
    std::fs::write(
        &manifest,
        format!(
            "[[system]]\nname = \"14\"\nfile = \"{}\"\nformulations = [\"base\", \"st\"]\nmode = \"exact\"\n",
            data("14bus.net")
        ),
    )
    .unwrap();
    let o = radkit(&["bench", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("system,formulation,n_binary"));
    assert!(lines[2].starts_with("14,st,48,"));
}

#[test]
fn thread_cap_must_be_a_number() {
    let o = Command::new(env!("CARGO_BIN_EXE_radkit"))
        .args(["validate", "--system", &data("14bus.net")])
        .env("RADKIT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
