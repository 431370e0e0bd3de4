mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use faultinject::cli;
use faultinject::evaluator::EvaluationReport;
use faultinject::injector::MutantMeta;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Output {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let argv = std::iter::once("faultinject").chain(args.iter().copied());
    let code = cli::run(argv, &mut stdout, &mut stderr);
    Output { code, stdout: String::from_utf8(stdout).unwrap(), stderr: String::from_utf8(stderr).unwrap() }
}

fn seeded() -> String {
    common::seeded_root().display().to_string()
}

fn p1() -> String {
    common::seeded_root().join("P1").display().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Every file below `root`, relative path to bytes.
fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    walkdir::WalkDir::new(root)
        .into_iter()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().is_file())
        .map(|e| (e.path().strip_prefix(root).unwrap().to_path_buf(), fs::read(e.path()).unwrap()))
        .collect()
}

fn metas(root: &Path) -> Vec<MutantMeta> {
    tree(root)
        .into_iter()
        .filter(|(p, _)| p.ends_with("meta.json"))
        .map(|(_, b)| serde_json::from_slice(&b).unwrap())
        .collect()
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&[]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["localize", "--corpus", &seeded()]).code, 2);
    assert_eq!(run(&["localize", "--corpus", &seeded(), "--report", "R1", "--top", "0"]).code, 2);
    assert_eq!(run(&["inject", "--corpus", &p1(), "--report", "R1", "--n", "0"]).code, 2);
    assert_eq!(run(&["inject", "--corpus", &p1(), "--n", "3"]).code, 2);
    assert_eq!(run(&["evaluate", "--budgets", "10,5"]).code, 2);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    for cmd in ["localize", "inject", "evaluate", "report"] {
        assert!(help.stdout.contains(cmd), "help lacks {cmd}");
    }
}

#[test]
fn data_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nowhere");
    assert_eq!(run(&["localize", "--corpus", s(&missing), "--report", "R1"]).code, 1);
    let out = run(&["localize", "--corpus", &seeded(), "--report", "R99"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("R99"));
    assert_eq!(run(&["evaluate", "--corpus", &seeded(), "--mutants", s(&missing)]).code, 1);
    let config = dir.path().join("bad.toml");
    fs::write(&config, "seed = \"seven\"\n").unwrap();
    assert_eq!(run(&["--config", s(&config), "localize", "--corpus", &seeded(), "--report", "R1"]).code, 1);
}

#[test]
fn localize_emits_the_requested_rows() {
    let out = run(&["localize", "--corpus", &seeded(), "--report", "R1", "--top", "50"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "rank,path,statement_index,score,file_score");
    assert_eq!(lines.len(), 51);
    assert!(lines[1].starts_with("1,src/"));
    let scoped = run(&["localize", "--corpus", &p1(), "--report", "R1", "--scope-file", "src/fees.mj"]);
    assert_eq!(scoped.code, 0);
    assert!(scoped.stdout.lines().skip(1).all(|l| l.split(',').nth(1) == Some("src/fees.mj")));
}

#[test]
fn baseline_injection_writes_ten_mutants() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["inject", "--corpus", &p1(), "--baseline", "--n", "10", "--seed", "7", "--out", s(dir.path())]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "emitted=10 requested=10\n");
    let metas = metas(dir.path());
    assert_eq!(metas.len(), 10);
    assert!(metas.iter().all(|m| m.mutant_id.starts_with("baseline-7-") && m.requested == 10));
    for m in &metas {
        let root = dir.path().join(&m.mutant_id);
        assert!(root.join("diff.patch").is_file());
        assert!(root.join(&m.statement.path).is_file());
    }
}

#[test]
fn injection_output_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |dir: &Path, jobs: &'static str| {
        run(&["inject", "--corpus", &seeded(), "--report", "R4", "--n", "40", "--jobs", jobs, "--out", s(dir)]).code
    };
    assert_eq!(args(a.path(), "1"), 0);
    assert_eq!(args(b.path(), "8"), 0);
    assert_eq!(tree(a.path()), tree(b.path()));
    // A rerun into the same directory leaves the same tree.
    assert_eq!(args(a.path(), "2"), 0);
    assert_eq!(tree(a.path()), tree(b.path()));
}

#[test]
fn scope_file_restricts_injection() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "inject", "--corpus", &p1(), "--report", "R1", "--n", "30", "--scope-file", "src/timetable.mj", "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let metas = metas(dir.path());
    assert!(!metas.is_empty());
    assert!(metas.iter().all(|m| m.statement.path == "src/timetable.mj"));
}

#[test]
fn corrupted_meta_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let mutants = dir.path().join("mutants");
    assert_eq!(run(&["inject", "--corpus", &p1(), "--report", "R1", "--n", "3", "--out", s(&mutants)]).code, 0);
    let meta = mutants.join("ibir-0-2/meta.json");
    fs::write(&meta, "{ not json").unwrap();
    let out = run(&["evaluate", "--corpus", &p1(), "--mutants", s(&mutants)]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("meta.json"), "{}", out.stderr);
}

#[test]
fn missing_budgets_warn_but_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let mutants = dir.path().join("mutants");
    let matrices = dir.path().join("matrices");
    let report = dir.path().join("report.json");
    assert_eq!(run(&["inject", "--corpus", &p1(), "--report", "R1", "--n", "10", "--out", s(&mutants)]).code, 0);
    let out = run(&[
        "evaluate", "--corpus", &p1(), "--mutants", s(&mutants), "--out", s(&report), "--emit-matrix", s(&matrices),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stderr.contains("budget 30 omitted"), "{}", out.stderr);
    assert!(out.stderr.contains("budget 100 omitted"));
    let parsed = EvaluationReport::from_json(&fs::read_to_string(&report).unwrap()).unwrap();
    let budgets: Vec<usize> = parsed.faults["F1"].values().flat_map(|m| m.keys().copied()).collect();
    assert_eq!(budgets, vec![5, 10]);
    let csv = fs::read_to_string(matrices.join("F1.csv")).unwrap();
    assert!(csv.lines().next().unwrap().ends_with(",F1"));
}

#[test]
fn report_needs_a_non_empty_current_schema() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    fs::write(&empty, r#"{"schema_version":1,"seed":0,"budgets":[5],"faults":{},"targets":{},"comparisons":[]}"#)
        .unwrap();
    assert_eq!(run(&["report", "--input", s(&empty), "--out", s(&dir.path().join("f"))]).code, 1);
    let old = dir.path().join("old.json");
    fs::write(&old, r#"{"schema_version":0}"#).unwrap();
    let out = run(&["report", "--input", s(&old), "--out", s(&dir.path().join("f"))]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("schema"));
}

#[test]
fn similarity_figure_has_one_box_per_source_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let mutants = dir.path().join("mutants");
    let report = dir.path().join("report.json");
    let figures = dir.path().join("figures");
    let corpus = p1();
    assert_eq!(run(&["inject", "--corpus", &corpus, "--report", "R1", "--n", "100", "--out", s(&mutants)]).code, 0);
    let base = run(&["inject", "--corpus", &corpus, "--report", "R1", "--baseline", "--n", "100", "--out", s(&mutants)]);
    assert_eq!(base.code, 0, "{}", base.stderr);
    let out = run(&["evaluate", "--corpus", &corpus, "--mutants", s(&mutants), "--out", s(&report)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stderr.is_empty());
    assert_eq!(run(&["report", "--input", s(&report), "--out", s(&figures)]).code, 0);
    let svg = fs::read_to_string(figures.join("similarity.svg")).unwrap();
    assert_eq!(svg.matches("fill=\"#9ecae1\"").count(), 8);
    for name in ["best_similarity.svg", "coupling.svg", "kendall.svg", "pearson.svg", "a12.svg", "summary.md"] {
        assert!(figures.join(name).is_file(), "{name} missing");
    }
    let summary = fs::read_to_string(figures.join("summary.md")).unwrap();
    assert!(summary.contains("ibir") && summary.contains("baseline"));
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_faultinject");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["--version"]), Some(0));
    assert_eq!(status(&["report"]), Some(2));
    assert_eq!(status(&["localize", "--corpus", &seeded(), "--report", "R404"]), Some(1));
    let out = Command::new(bin).args(["localize", "--corpus", &seeded(), "--report", "R2", "--top", "5"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 6);
}
