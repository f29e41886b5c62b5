//! End-to-end checks of the command line surface.

use std::process::{Command, Output};

fn kspm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kspm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn fixedpoint_json() {
    let out = kspm(&["fixedpoint", "--d", "3", "--n", "9", "--format", "json"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "[0,2,0,0,1]\n");

    let out = kspm(&["fixedpoint", "--d", "3", "--n", "0", "--format", "json"]);
    assert_eq!(stdout(&out), "[]\n");
}

#[test]
fn fixedpoint_rejects_degenerate_rule() {
    let out = kspm(&["fixedpoint", "--d", "1", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("at least 2"), "stderr: {err}");
}

#[test]
fn fixedpoint_csv_lists_heights() {
    let out = kspm(&["fixedpoint", "--d", "3", "--n", "9", "--format", "csv"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("column,slope,height"));
    assert_eq!(lines.next(), Some("0,0,3"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn transducer_run_caption_word() {
    let out = kspm(&["transducer", "run", "--d", "3", "--input", "abaaaaab"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("abaab"));
    assert!(text.contains("end state: 21"));
}

#[test]
fn transducer_run_rejects_foreign_letter() {
    let out = kspm(&["transducer", "run", "--d", "3", "--input", "abc"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn transducer_build_emits_dot() {
    let out = kspm(&["transducer", "build", "--d", "3"]);
    assert!(out.status.success());
    let dot = stdout(&out);
    assert_eq!(dot.matches("shape=").count(), 7, "one node per state");
    assert!(dot.starts_with("digraph"));
}

#[test]
fn transducer_steps_trajectory() {
    let out = kspm(&["transducer", "steps", "--d", "3", "--input", "bbbb"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("iterations to an alternating prefix"));
    assert!(text.lines().any(|l| l.starts_with("t^0: bbbb")));
}

#[test]
fn avalanches_ascii_and_svg() {
    let out = kspm(&["avalanches", "--d", "4", "--n", "500", "--format", "ascii"]);
    let text = stdout(&out);
    assert!(text.lines().count() > 2);
    assert!(text.lines().next().unwrap().contains('v'));

    let out = kspm(&["avalanches", "--d", "4", "--n", "500", "--format", "svg"]);
    let svg = stdout(&out);
    assert!(svg.starts_with("<?xml"));
    assert!(svg.trim_end().ends_with("</svg>"));

    let out = kspm(&["avalanches", "--d", "3", "--n", "9", "--format", "ascii"]);
    assert!(stdout(&out).contains("no long avalanches"));
}

#[test]
fn avalanches_jsonl_parses_back() {
    let out = kspm(&["avalanches", "--d", "3", "--n", "40", "--format", "jsonl"]);
    let text = stdout(&out);
    let records = kspm::avalanche::AvalancheLog::parse_jsonl(&text).unwrap();
    assert_eq!(records.len(), 40);
    assert_eq!(records[8].firings, vec![0, 2]);
}

#[test]
fn sweep_csv_parses_back() {
    let out = kspm(&["sweep", "--d", "3", "--n-max", "30"]);
    let rows = kspm::wave::SweepTable::parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 30);
    assert_eq!(rows[8].start_column, 5);
}

#[test]
fn pipeline_report_json() {
    let out = kspm(&["pipeline", "--d", "4", "--n", "500"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["base_word"], "0120120210");
    assert!(report["intervals"].as_array().unwrap().len() > 1);
}

#[test]
fn verify_seeded_reports_are_reproducible() {
    let args = [
        "verify",
        "--suite",
        "core-laws",
        "--seed",
        "7",
        "--samples",
        "200",
        "--n-max",
        "60",
        "--format",
        "json",
    ];
    let first = kspm(&args);
    let second = kspm(&args);
    assert!(first.status.success());
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn verify_reports_independent_of_worker_count() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_kspm"))
            .env("KSPM_THREADS", threads)
            .args([
                "verify", "--suite", "appendix-words", "--seed", "3", "--samples", "500",
                "--format", "json",
            ])
            .output()
            .expect("binary runs");
        assert!(out.status.success());
        stdout(&out)
    };
    assert_eq!(run("1"), run("5"));
}

#[test]
fn verify_theorem_small() {
    let out = kspm(&["verify", "--suite", "theorem3", "--n-max", "2000"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("result: PASS"));
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    let out = kspm(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}
