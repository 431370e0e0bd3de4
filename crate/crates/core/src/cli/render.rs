//! Figures and a markdown summary drawn from an evaluation report.

use std::fmt::Write;

use thiserror::Error;

use super::figures::{bar_chart, box_plot, Group};
use crate::evaluator::{median, BudgetMetrics, EvaluationReport, Stat, SCHEMA_VERSION};
use crate::injector::MutantSource;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("report schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("report contains no evaluated faults")]
    Empty,
}

/// Parses report JSON, checking the schema version.
pub fn parse_report(text: &str) -> Result<EvaluationReport, RenderError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| RenderError::SchemaMismatch(e.to_string()))?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(SCHEMA_VERSION) => {}
        Some(v) => return Err(RenderError::SchemaMismatch(format!("schema_version {v}, expected {SCHEMA_VERSION}"))),
        None => return Err(RenderError::SchemaMismatch("missing schema_version".into())),
    }
    serde_json::from_value(value).map_err(|e| RenderError::SchemaMismatch(e.to_string()))
}

/// (source, budget) pairs present in the report, budget-major.
fn cells(report: &EvaluationReport) -> Vec<(MutantSource, usize)> {
    let mut out = Vec::new();
    for &b in &report.budgets {
        for s in MutantSource::ALL {
            if report.faults.values().any(|f| f.get(&s).is_some_and(|m| m.contains_key(&b))) {
                out.push((s, b));
            }
        }
    }
    out
}

fn metrics(report: &EvaluationReport, source: MutantSource, budget: usize) -> impl Iterator<Item = &BudgetMetrics> {
    report.faults.values().filter_map(move |f| f.get(&source)?.get(&budget))
}

fn groups(report: &EvaluationReport, pick: impl Fn(&BudgetMetrics) -> Vec<f64>) -> Vec<Group> {
    cells(report)
        .into_iter()
        .map(|(s, b)| Group { label: format!("{s} {b}"), values: metrics(report, s, b).flat_map(&pick).collect() })
        .collect()
}

fn defined(s: Stat) -> Vec<f64> {
    s.value().into_iter().collect()
}

/// Every figure as (file name, SVG text), then `summary.md`.
pub fn render(report: &EvaluationReport) -> Result<Vec<(String, String)>, RenderError> {
    if report.faults.is_empty() {
        return Err(RenderError::Empty);
    }
    let mut files = vec![
        (
            "similarity.svg".to_string(),
            box_plot(
                "Similarity of every mutant to its fault",
                &groups(report, |m| m.mutants.iter().map(|x| x.ochiai).collect()),
                0.0,
                1.0,
            ),
        ),
        (
            "best_similarity.svg".to_string(),
            box_plot("Best similarity per fault", &groups(report, |m| vec![m.best_ochiai]), 0.0, 1.0),
        ),
    ];
    let coupling: Vec<Group> = cells(report)
        .into_iter()
        .map(|(s, b)| {
            let all: Vec<bool> = metrics(report, s, b).map(|m| m.any_coupled).collect();
            let frac = all.iter().filter(|&&c| c).count() as f64 / all.len().max(1) as f64;
            Group { label: format!("{s} {b}"), values: vec![frac] }
        })
        .collect();
    files.push(("coupling.svg".to_string(), bar_chart("Faults with a coupled mutant", &coupling, 0.0, 1.0)));
    files.push((
        "kendall.svg".to_string(),
        box_plot("Kendall tau-b, detection ratio vs fault detection", &groups(report, |m| defined(m.suites.kendall_tau_b)), -1.0, 1.0),
    ));
    files.push((
        "pearson.svg".to_string(),
        box_plot("Pearson r, detection ratio vs fault detection", &groups(report, |m| defined(m.suites.pearson_r)), -1.0, 1.0),
    ));
    files.push((
        "a12.svg".to_string(),
        box_plot("A12, detection ratio of fault-detecting suites", &groups(report, |m| defined(m.suites.a12)), 0.0, 1.0),
    ));
    files.push(("summary.md".to_string(), summary(report)));
    Ok(files)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.3}"))
}

/// Markdown tables: per (budget, source) medians and cross-source tests.
pub fn summary(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Evaluation summary\n");
    let _ = writeln!(out, "Seed {}, {} faults.\n", report.seed, report.faults.len());
    let _ = writeln!(
        out,
        "| budget | source | faults | median best similarity | coupled fraction | median kendall | median pearson | median A12 |"
    );
    let _ = writeln!(out, "|---|---|---|---|---|---|---|---|");
    for (s, b) in cells(report) {
        let ms: Vec<&BudgetMetrics> = metrics(report, s, b).collect();
        let best: Vec<f64> = ms.iter().map(|m| m.best_ochiai).collect();
        let coupled = ms.iter().filter(|m| m.any_coupled).count() as f64 / ms.len().max(1) as f64;
        let med = |f: &dyn Fn(&BudgetMetrics) -> Stat| {
            median(&ms.iter().filter_map(|m| f(m).value()).collect::<Vec<f64>>())
        };
        let _ = writeln!(
            out,
            "| {b} | {s} | {} | {} | {coupled:.3} | {} | {} | {} |",
            ms.len(),
            fmt_opt(median(&best)),
            fmt_opt(med(&|m| m.suites.kendall_tau_b)),
            fmt_opt(med(&|m| m.suites.pearson_r)),
            fmt_opt(med(&|m| m.suites.a12)),
        );
    }
    if !report.comparisons.is_empty() {
        let _ = writeln!(out, "\n| budget | paired faults | paired Wilcoxon p | rank-sum p | A12 ibir vs baseline |");
        let _ = writeln!(out, "|---|---|---|---|---|");
        for c in &report.comparisons {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                c.budget, c.paired_targets, c.best_ochiai_paired_p, c.best_ochiai_rank_sum_p, c.best_ochiai_a12
            );
        }
    }
    out
}
