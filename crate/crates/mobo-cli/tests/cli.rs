//! End-to-end checks of the `mobo` binary: run → summarise → convergence on
//! a miniature experiment, flag overrides, the output-directory environment
//! variable, and failure reporting.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mobo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mobo"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mobo-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn record_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|entry| entry.unwrap().file_name().into_string().unwrap())
        .filter(|name| name.ends_with(".jsonl"))
        .collect();
    names.sort();
    names
}

#[test]
fn list_problems_prints_both_families() {
    let output = mobo().arg("list-problems").output().unwrap();
    assert!(output.status.success());
    let text = stdout_of(&output);
    assert!(text.contains("DTLZ1"), "{text}");
    assert!(text.contains("WFG9"), "{text}");
    assert!(text.contains("WFG4_10_3"), "{text}");
}

#[test]
fn run_summarise_convergence_round_trip() {
    let dir = tmp_dir("roundtrip");
    let config_path = dir.join("experiment.toml");
    std::fs::write(
        &config_path,
        r#"
problems = ["DTLZ2_2_2"]
models = ["GBT"]
scalarisers = ["PHC"]
include_random = true
repeats = 5
base_seed = 9
initial_samples = "2d"
post_init_evaluations = 3
acquisition_budget = "32"
jobs = 2
"#,
    )
    .unwrap();
    let records_dir = dir.join("records");

    let output = mobo()
        .arg("run")
        .arg(&config_path)
        .arg("--out")
        .arg(&records_dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert!(stdout_of(&output).contains("10 runs completed, 0 failed"));
    let files = record_files(&records_dir);
    assert_eq!(files.len(), 10, "{files:?}");
    assert!(files.iter().any(|f| f.contains("__GBT_PHC__r004")));
    assert!(files.iter().any(|f| f.contains("__RANDOM__r000")));

    let output = mobo()
        .arg("summarise")
        .arg(&records_dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr_of(&output));
    let text = stdout_of(&output);
    assert!(text.contains("DTLZ2_2_2 — best:"), "{text}");
    assert!(text.contains("GBT_PHC"), "{text}");
    assert!(text.contains("RANDOM"), "{text}");
    assert!(records_dir.join("summary.csv").exists());
    assert!(records_dir.join("best_counts.csv").exists());
    let csv = std::fs::read_to_string(records_dir.join("summary.csv")).unwrap();
    assert!(csv.lines().count() >= 3, "{csv}"); // header + two methods

    let output = mobo()
        .arg("convergence")
        .arg(&records_dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr_of(&output));
    let csv = std::fs::read_to_string(records_dir.join("convergence.csv")).unwrap();
    // 2 methods × 7 evaluations, plus the header.
    assert_eq!(csv.lines().count(), 15, "{csv}");

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn flags_override_config_keys() {
    let dir = tmp_dir("override");
    let config_path = dir.join("experiment.toml");
    std::fs::write(
        &config_path,
        r#"
problems = ["DTLZ2_2_2"]
models = ["GBT"]
scalarisers = ["PHC"]
repeats = 5
initial_samples = "2d"
post_init_evaluations = 3
acquisition_budget = "32"
"#,
    )
    .unwrap();
    let records_dir = dir.join("records");

    let output = mobo()
        .arg("run")
        .arg(&config_path)
        .args(["--repeats", "2"])
        .args(["--include-random", "false"])
        .args(["--seed", "123"])
        .arg("--out")
        .arg(&records_dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr_of(&output));
    let files = record_files(&records_dir);
    // Random disabled, repeats cut to 2: exactly the GBT_PHC pair remains.
    assert_eq!(files.len(), 2, "{files:?}");
    assert!(files.iter().all(|f| f.contains("__GBT_PHC__")));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn flags_alone_define_an_experiment_without_a_config_file() {
    let dir = tmp_dir("flagsonly");
    let records_dir = dir.join("records");
    let output = mobo()
        .arg("run")
        .args(["--problems", "DTLZ2_2_2"])
        .args(["--models", "GBT"])
        .args(["--scalarisers", "PHC"])
        .args(["--include-random", "false"])
        .args(["--repeats", "1"])
        .args(["--initial-samples", "4"])
        .args(["--post-init-evaluations", "2"])
        .args(["--acquisition-budget", "32"])
        .arg("--out")
        .arg(&records_dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert_eq!(record_files(&records_dir).len(), 1);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn out_dir_environment_variable_supplies_the_default() {
    let dir = tmp_dir("envvar");
    let records_dir = dir.join("env-records");
    let output = mobo()
        .arg("run")
        .args(["--problems", "DTLZ2_2_2"])
        .args(["--models", "GBT"])
        .args(["--scalarisers", "PHC"])
        .args(["--include-random", "false"])
        .args(["--repeats", "1"])
        .args(["--initial-samples", "4"])
        .args(["--post-init-evaluations", "2"])
        .args(["--acquisition-budget", "32"])
        .env("MOBO_OUT_DIR", &records_dir)
        .current_dir(&dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert_eq!(record_files(&records_dir).len(), 1);

    // The records default applies to reading verbs too.
    let output = mobo()
        .arg("convergence")
        .env("MOBO_OUT_DIR", &records_dir)
        .current_dir(&dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert!(records_dir.join("convergence.csv").exists());

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn invalid_configuration_fails_with_a_diagnostic() {
    let output = mobo()
        .arg("run")
        .args(["--problems", "DTLZ9_5_2"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(stderr_of(&output).contains("DTLZ9"), "{}", stderr_of(&output));

    let output = mobo().arg("summarise").arg("/nonexistent-dir").output().unwrap();
    assert!(!output.status.success());
}
