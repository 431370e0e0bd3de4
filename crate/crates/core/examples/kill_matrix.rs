//! Runs a project's tests against injected mutants and prints the kill
//! matrix with each mutant's similarity to the real fault.
//!
//! cargo run --example kill_matrix -- [REPORT_ID] [N]

use std::path::Path;

use faultinject::corpus::load_suite;
use faultinject::evaluator::{build_kill_matrix, is_coupled, ochiai};
use faultinject::injector::{inject, InjectionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let report_id = args.next().unwrap_or_else(|| "R1".to_string());
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);

    let suite = load_suite(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/seeded"))?;
    let (corpus, report) = suite.find_report(&report_id).ok_or(format!("no report {report_id}"))?;
    let fault = corpus.fault_for_report(report).ok_or("report has no linked fault")?;

    let mutants = inject(corpus, report, &InjectionConfig::new(n, 0))?;
    let matrix = build_kill_matrix(corpus, &mutants, fault, 0)?;
    let fault_column = matrix.column_of(&fault.fault_id).expect("fault column");

    println!("{} tests, fault {} fails {}", matrix.tests.len(), fault.fault_id, fault.failing_tests.join(" "));
    for (s, id) in matrix.subjects.iter().enumerate() {
        let column = matrix.column(s);
        let row: String = column.iter().map(|&k| if k { 'x' } else { '.' }).collect();
        let similarity = ochiai(&column, &fault_column)?;
        let coupled = if is_coupled(&column, &fault_column)? { "coupled" } else { "" };
        println!("{id:<14} {row}  {similarity:.3} {coupled}");
    }
    Ok(())
}
