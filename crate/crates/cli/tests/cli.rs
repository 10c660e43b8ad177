//! Exit-code and output contract of the binary.

use std::process::Command;

fn cemax() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cemax"))
}

fn write_config(dir: &std::path::Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn sweep_writes_csv_and_exits_zero() {
    let dir = std::env::temp_dir().join("cemax-cli-ok");
    std::fs::create_dir_all(&dir).unwrap();
    let config = write_config(
        &dir,
        "ok.json",
        r#"{"scenario": "scheme_compare", "sweep": {"L": [5e4]}}"#,
    );
    let out_path = dir.join("rows.csv");
    let output = cemax()
        .args(["sweep", &config, "--out", out_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("scenario,L,G_scale,scheme,user,iter,t_s,f_hz,p_w,ce_bits_per_joule"));
    // joint + local_only + offload_only, two users each, one sweep point.
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn infeasible_row_exits_one() {
    let dir = std::env::temp_dir().join("cemax-cli-infeasible");
    std::fs::create_dir_all(&dir).unwrap();
    // 2e6 bits exceed both the local capacity and the secure uplink capacity.
    let config = write_config(
        &dir,
        "hard.json",
        r#"{"scenario": "scheme_compare", "sweep": {"L": [2e6]}}"#,
    );
    let out_path = dir.join("rows.csv");
    let output = cemax()
        .args(["sweep", &config, "--out", out_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(out_path.exists(), "rows are still written for inspection");
}

#[test]
fn config_errors_exit_two() {
    let dir = std::env::temp_dir().join("cemax-cli-bad");
    std::fs::create_dir_all(&dir).unwrap();
    let config = write_config(
        &dir,
        "bad.json",
        r#"{"scenario": "single_run", "bogus": 1}"#,
    );
    let output = cemax().args(["sweep", &config]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let missing = cemax()
        .args(["solve", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn oracle_reports_efficiency() {
    let dir = std::env::temp_dir().join("cemax-cli-oracle");
    std::fs::create_dir_all(&dir).unwrap();
    let config = write_config(&dir, "one.json", r#"{"scenario": "single_run"}"#);
    let output = cemax()
        .args(["oracle", &config, "--grid", "40"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("oracle efficiency"), "{text}");
}
