use std::fs;
use std::process::{Command, Output};

use gpt_recon::report::parse_report;
use gpt_recon::Verdict;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpt-recon"))
        .args(args)
        .env_remove("GPT_RECON_TOLERANCE")
        .output()
        .expect("binary runs")
}

#[test]
fn exit_codes_follow_verdicts() {
    assert_eq!(run(&["check", "classical:3", "--samples", "20"]).status.code(), Some(0));
    assert_eq!(run(&["check", "qubit", "--samples", "10"]).status.code(), Some(0));
    let g = run(&["check", "gbit", "--samples", "20"]);
    assert_eq!(g.status.code(), Some(2));
    let report = parse_report(&g.stdout).unwrap();
    assert!(report.stages.iter().any(|s| s.verdict == Verdict::Fail && s.witness.is_some()));
}

#[test]
fn input_errors_exit_one() {
    let out = run(&["check", "/no/such/theory.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["check", bad.to_str().unwrap()]).status.code(), Some(1));

    let ragged = dir.path().join("ragged.json");
    fs::write(&ragged, r#"{"preparations":["a","b"],"outcomes":["x","y"],"statistics":[[1,0],[0.5]]}"#).unwrap();
    assert_eq!(run(&["check", ragged.to_str().unwrap()]).status.code(), Some(1));

    assert_eq!(run(&["check", "classical:3", "--tolerance", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["check"]).status.code(), Some(1));
}

#[test]
fn document_input_runs_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bit.json");
    fs::write(
        &path,
        r#"{"preparations":["p0","p1"],"outcomes":["e0","e1","unit"],
            "statistics":[[1,0,1],[0,1,1]],"product":{"kind":"pointwise"},
            "involution":{"kind":"identity"},"unit_column":2}"#,
    )
    .unwrap();
    let out = run(&["check", path.to_str().unwrap(), "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(parse_report(&out.stdout).unwrap().instance, "bit");
}

#[test]
fn list_builtins_names_every_instance() {
    let out = run(&["list-builtins"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().collect();
    assert!(names.contains(&"qubit") && names.contains(&"gbit") && names.contains(&"classical:8"));
}

#[test]
fn report_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["check", "classical:2", "--samples", "20", "--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&path).unwrap(), out.stdout);
    // no temporary file left behind
    let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
}

#[test]
fn text_format_lists_stages() {
    let out = run(&["check", "gbit", "--samples", "20", "--format", "text"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL") && text.contains("PASS"));
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_err());
}

#[test]
fn tolerance_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_gpt-recon"))
        .args(["check", "classical:2", "--samples", "10"])
        .env("GPT_RECON_TOLERANCE", "1e-6")
        .output()
        .unwrap();
    assert_eq!(parse_report(&out.stdout).unwrap().tolerance, 1e-6);
    let out = Command::new(env!("CARGO_BIN_EXE_gpt-recon"))
        .args(["check", "classical:2", "--samples", "10", "--tolerance", "1e-7"])
        .env("GPT_RECON_TOLERANCE", "1e-6")
        .output()
        .unwrap();
    assert_eq!(parse_report(&out.stdout).unwrap().tolerance, 1e-7);
    let out = Command::new(env!("CARGO_BIN_EXE_gpt-recon"))
        .args(["check", "classical:2"])
        .env("GPT_RECON_TOLERANCE", "tight")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = run(&["check", "gbit", "--samples", "30", "--seed", "7"]);
    let b = run(&["check", "gbit", "--samples", "30", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
}
