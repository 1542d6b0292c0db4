//! End-to-end tests against the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rcmforge"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

struct TempFile(PathBuf);

impl TempFile {
    fn new(name: &str, contents: &str) -> Self {
        let path = std::env::temp_dir().join(format!("rcmforge-test-{}-{name}", std::process::id()));
        std::fs::write(&path, contents).expect("temp file writes");
        TempFile(path)
    }

    fn path(&self) -> String {
        self.0.display().to_string()
    }
}

impl Drop for TempFile {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

#[test]
fn validate_all_fixtures_exits_zero() {
    let mut paths: Vec<String> = std::fs::read_dir(fixtures())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "rcm"))
        .map(|p| p.display().to_string())
        .collect();
    paths.sort();
    let args: Vec<&str> = std::iter::once("validate")
        .chain(paths.iter().map(String::as_str))
        .collect();
    let output = run(&args);
    assert_eq!(exit_code(&output), 0, "{}", stdout(&output));
    assert!(stdout(&output).contains("air-ok[0]: Pass"));
    assert!(stdout(&output).contains("factual-rule"));
}

#[test]
fn validate_reports_ineligible_time_and_exits_one() {
    let bad = TempFile::new(
        "bad.rcm",
        "req \"bad\" {\n  pr {\n    if X is ON every 2 seconds\n    do Y is ON\n  }\n}\n",
    );
    let output = run(&["validate", &bad.path()]);
    assert_eq!(exit_code(&output), 1);
    assert!(stdout(&output).contains("in-between-time ineligible on condition"));
}

#[test]
fn validate_missing_action_exits_one_with_issue() {
    let bad = TempFile::new(
        "no-action.rcm",
        "req \"no-action\" {\n  pr {\n    if X is ON\n  }\n}\n",
    );
    let output = run(&["validate", &bad.path()]);
    assert_eq!(exit_code(&output), 1);
    assert!(stdout(&output).contains("no action"));
}

#[test]
fn transform_output_is_deterministic() {
    let args = ["transform", "--to=mtl,ctl", &fixture("req-ex.rcm")];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn validate_mixed_batch_reports_per_file_statuses() {
    let bad = TempFile::new(
        "mixed-bad.rcm",
        "req \"bad\" {\n  pr {\n    do the monitor sends REQ_Sig\n  }\n}\n",
    );
    let output = run(&["validate", &fixture("monitor-init.rcm"), &bad.path()]);
    assert_eq!(exit_code(&output), 1);
    let out = stdout(&output);
    assert!(out.contains("monitor-init[0]: Pass"));
    assert!(out.contains("unbound frame: send/2"));
}

#[test]
fn validate_accepts_canonical_json() {
    let req = rcm::parser::parse_dsl(
        &std::fs::read_to_string(fixtures().join("air-ok.rcm")).unwrap(),
    )
    .unwrap();
    let json = TempFile::new("air-ok.json", &rcm::canon::dump_canonical(&req));
    let output = run(&["validate", &json.path()]);
    assert_eq!(exit_code(&output), 0, "{}", stdout(&output));
    assert!(stdout(&output).contains("air-ok[0]: Pass"));
}

#[test]
fn transform_emits_blocks_for_both_targets() {
    let output = run(&["transform", "--to=mtl,ctl", &fixture("air-ok.rcm")]);
    assert_eq!(exit_code(&output), 0);
    let out = stdout(&output);
    assert!(out.contains("== air-ok[0] :: MTL"));
    assert!(out.contains("completeness: Full"));
    assert!(out.contains(
        "formula: G((air_ok_signal = low) -> F[t<=3](auto_control_mode = terminated))"
    ));
    assert!(out.contains("== air-ok[0] :: CTL"));
    assert!(out.contains("completeness: Partial"));
    assert!(out.contains("dropped: A-pt (rule 11)"));
    assert!(out.contains(
        "formula: AG((air_ok_signal = low) -> (auto_control_mode = terminated))"
    ));
}

#[test]
fn transform_partial_results_exit_zero() {
    let output = run(&["transform", "--to=mtl", &fixture("cognitive-threshold.rcm")]);
    assert_eq!(exit_code(&output), 0);
    let out = stdout(&output);
    assert!(out.contains("dropped: Hidden (rule 25)"));
    assert!(out.contains("formula: G(the_cognitive_threshold = the_deviation)"));
}

#[test]
fn transform_ascii_flag_replaces_the_glyph() {
    let output = run(&[
        "transform",
        "--to=ctl",
        "--ascii",
        &fixture("cognitive-threshold.rcm"),
    ]);
    assert_eq!(exit_code(&output), 0);
    let out = stdout(&output);
    assert!(out.contains("(exists deviation < 5)"));
    assert!(!out.contains("\u{2203}"));
}

#[test]
fn transform_factual_rule_emits_bare_atom_unless_wrapped() {
    let output = run(&["transform", "--to=mtl", &fixture("monitor-init.rcm")]);
    assert!(stdout(&output).contains("formula: monitor_mode = INIT"));

    let output = run(&[
        "transform",
        "--to=mtl",
        "--wrap-factual",
        &fixture("monitor-init.rcm"),
    ]);
    assert!(stdout(&output).contains("formula: G(monitor_mode = INIT)"));
}

#[test]
fn coverage_text_report_shows_rcm_at_full_coverage() {
    let output = run(&["coverage", &fixture("air-ok.rcm"), &fixture("monitor-init.rcm")]);
    assert_eq!(exit_code(&output), 0);
    let out = stdout(&output);
    assert!(out.contains("RCM"));
    assert!(out.contains("100.0%"));
    assert!(out.contains("Properties-count histogram:"));
}

#[test]
fn coverage_missing_file_is_an_io_error() {
    let output = run(&["coverage", "/nonexistent/input.rcm"]);
    assert_eq!(exit_code(&output), 2);
    assert!(String::from_utf8_lossy(&output.stderr).contains("empty corpus"));
}

#[test]
fn coverage_custom_registry_covers_only_factual_rules() {
    let registry = TempFile::new("registry.tsv", "A16\tOnly actions\tA\n");
    let output = run(&[
        "coverage",
        &format!("--registry={}", registry.path()),
        "--format=csv",
        &fixture("monitor-init.rcm"),
        &fixture("air-ok.rcm"),
        &fixture("cognitive-threshold.rcm"),
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stdout(&output));
    let out = stdout(&output);
    assert!(out.starts_with("id,A16,RCM"));
    assert!(out.contains("monitor-init[0],1,1"));
    assert!(out.contains("air-ok[0],0,1"));
    assert!(out.contains("cognitive-threshold[0],0,1"));
    assert!(out.contains("covered,1,3"));
}

#[test]
fn coverage_registry_parse_errors_abort_with_path_and_line() {
    let registry = TempFile::new("bad-registry.tsv", "A16\tX\tC,T\n");
    let output = run(&[
        "coverage",
        &format!("--registry={}", registry.path()),
        &fixture("monitor-init.rcm"),
    ]);
    assert_eq!(exit_code(&output), 2);
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains(":1"), "{err}");
}

#[test]
fn coverage_output_is_deterministic() {
    let args = [
        "coverage",
        &fixture("req-ex.rcm"),
        &fixture("scopes.rcm"),
        &fixture("variants.rcm"),
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(exit_code(&first), 0);
}

#[test]
fn frames_list_and_check() {
    let output = run(&["frames", "list"]);
    assert_eq!(exit_code(&output), 0);
    let out = stdout(&output);
    assert!(out.contains("exceed/2\trelational\t$1 > $2"));
    assert!(out.contains("send/3\tprocess\tsend($1, $3, $2)"));

    let output = run(&["frames", "check"]);
    assert!(stdout(&output).contains("frames ok"));
}

#[test]
fn frames_env_overrides_default_database() {
    let tiny = TempFile::new("tiny.tsv", "exceed\t2\trelational\t$1 > $2\n");
    let output = bin()
        .env("RCMFORGE_FRAMES", tiny.0.as_os_str())
        .args(["frames", "check"])
        .output()
        .unwrap();
    assert!(stdout(&output).contains("1 frames ok"));

    // A database without the needed frames turns parsing into failures.
    let output = bin()
        .env("RCMFORGE_FRAMES", tiny.0.as_os_str())
        .args(["validate", &fixture("air-ok.rcm")])
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 1);
    assert!(stdout(&output).contains("unbound frame"));
}

#[test]
fn unknown_flags_are_usage_errors() {
    let output = run(&["transform", "--bogus", &fixture("air-ok.rcm")]);
    assert_eq!(exit_code(&output), 2);
}
