use inkage::config::RunConfig;
use std::path::Path;
use std::process::{Command, Output};

fn inkage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inkage")).args(args).output().expect("binary runs")
}

fn error_kind(out: &Output) -> String {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("error record on stderr");
    let v: serde_json::Value = serde_json::from_str(line).expect("error record is JSON");
    v["error"].as_str().expect("error kind").to_string()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn print_config_round_trips() {
    let out = inkage(&["--print-config", "--seed", "7"]);
    assert!(out.status.success());
    let cfg = RunConfig::from_toml_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg, RunConfig { seed: 7, ..RunConfig::default() });
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "seed = 3\nlearning_rate = 0.1\n");
    let out = inkage(&["--config", &path, "report"]);
    assert!(!out.status.success());
    assert_eq!(error_kind(&out), "ConfigInvalid");
}

#[test]
fn missing_artifact_fails() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let out = inkage(&["--run-dir", run.to_str().unwrap(), "train-eval"]);
    assert!(!out.status.success());
    assert_eq!(error_kind(&out), "MissingArtifact");
}

#[test]
fn missing_subcommand_fails() {
    assert!(!inkage(&[]).status.success());
}

#[test]
fn small_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let path = write_config(
        dir.path(),
        &format!("run_dir = {:?}\nsubjects_per_group = 5\ngbdt_max_rounds = 30\n", run.display().to_string()),
    );
    let out = inkage(&["--config", &path, "--jobs", "2", "all"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = std::fs::read_to_string(run.join("report/metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 31);
    assert!(run.join("run.json").exists());
    assert!(run.join("explain/EFvsEE_D_T_gbdt.shap.json").exists());

    let out = inkage(&["--config", &path, "explain", "--task", "YYvsEE", "--dataset", "D_L", "--model", "logreg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(run.join("explain/YYvsEE_D_L_logreg.shap.json").exists());
}
