use std::path::Path;
use std::process::Command;

fn gtrbench(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gtrbench"))
        .args(args)
        .arg("--config")
        .arg(dir.join("config.json"))
        .arg("--out")
        .arg(dir)
        .env_remove("GTR_API_KEY")
        .env_remove("GTR_API_BASE")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, extra: &str) {
    let text = format!(
        r#"{{"generation": {{"tasks": ["Conn", "SP"], "per_task": 6, "eval_per_task": 3}}, "seed": 4{extra}}}"#
    );
    std::fs::write(dir.join("config.json"), text).unwrap();
}

#[test]
fn mock_pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "");
    for stage in ["generate", "probe", "build-gtrp", "train-router", "evaluate", "report"] {
        let out = gtrbench(dir.path(), &[stage, "--endpoint", "mock"]);
        assert!(out.status.success(), "{stage}: {}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["questions.jsonl", "probes.jsonl", "gtrp.jsonl", "router.json", "eval_report.json", "report.md"] {
        assert!(dir.path().join(file).exists(), "{file}");
    }
    let rebuilt = gtrbench(dir.path(), &["build-gtrp", "--alpha", "1.5"]);
    assert!(rebuilt.status.success());
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "");
    assert_eq!(gtrbench(dir.path(), &["generate", "--k", "0"]).status.code(), Some(2));
    write_config(dir.path(), r#", "unknown_key": 1"#);
    assert_eq!(gtrbench(dir.path(), &["generate"]).status.code(), Some(2));
}

#[test]
fn unreachable_endpoint_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    write_config(
        dir.path(),
        &format!(r#", "endpoint": {{"base_url": "http://127.0.0.1:{port}", "max_retries": 0, "timeout_secs": 2}}"#),
    );
    assert!(gtrbench(dir.path(), &["generate"]).status.success());
    let out = gtrbench(dir.path(), &["probe", "--endpoint", "http"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
