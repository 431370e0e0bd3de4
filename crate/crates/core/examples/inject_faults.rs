//! Injects report-driven mutants into a seeded project and prints their diffs.
//!
//! cargo run --example inject_faults -- [REPORT_ID] [N]

use std::path::Path;

use faultinject::corpus::load_suite;
use faultinject::injector::{inject, InjectionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let report_id = args.next().unwrap_or_else(|| "R1".to_string());
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);

    let suite = load_suite(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/seeded"))?;
    let (corpus, report) = suite.find_report(&report_id).ok_or(format!("no report {report_id}"))?;

    for m in inject(corpus, report, &InjectionConfig::new(n, 0))? {
        let donor = m.donor.as_deref().unwrap_or("-");
        println!("# {} at {} (IRFL rank {:?}) {} {donor}", m.mutant_id, m.statement, m.location_rank, m.pattern_id);
        println!("{}", m.diff);
    }
    Ok(())
}
