//! Injects, evaluates and summarizes every seeded target, comparing
//! report-driven mutants with the random baseline.
//!
//! cargo run --release --example full_experiment -- [SEED]

use faultinject::cli::summary;
use faultinject::experiment::{run_experiment, ExperimentConfig};
use faultinject::injector::MutantSource;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig {
        corpus_root: concat!(env!("CARGO_MANIFEST_DIR"), "/examples/seeded").into(),
        seed: std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0),
        ..ExperimentConfig::default()
    };
    let outcome = run_experiment(&config)?;
    for (fault, sources) in &outcome.report.faults {
        let cells: Vec<String> = MutantSource::ALL
            .iter()
            .filter_map(|s| sources.get(s).map(|m| (s, m)))
            .map(|(s, m)| {
                let best: Vec<String> = m.iter().map(|(b, x)| format!("{b}:{:.2}", x.best_ochiai)).collect();
                format!("{s} {}", best.join(" "))
            })
            .collect();
        println!("{fault:<4} {}", cells.join(" | "));
    }
    println!();
    print!("{}", summary(&outcome.report));
    Ok(())
}
