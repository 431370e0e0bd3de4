//! Ranks the statements of a seeded project against one of its bug reports.
//!
//! cargo run --example localize -- [REPORT_ID] [TOP]

use std::path::Path;

use faultinject::corpus::load_suite;
use faultinject::irloc::Localizer;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let report_id = args.next().unwrap_or_else(|| "R1".to_string());
    let top: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);

    let suite = load_suite(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/seeded"))?;
    let (corpus, report) = suite.find_report(&report_id).ok_or(format!("no report {report_id}"))?;
    println!("{} / {}: {}", corpus.name, report.id, report.title);

    let ranked = Localizer::new(corpus)?.localize(report, 20, top, None)?;
    for loc in &ranked {
        let text = corpus.source(&loc.statement.path).and_then(|f| f.statement_text(loc.statement.index)).unwrap_or("");
        println!("{:>3}  {:.4}  {:<28} {}", loc.rank, loc.score, loc.statement.to_string(), text);
    }
    Ok(())
}
