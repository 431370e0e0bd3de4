//! Samples classical mutants at random and shows how they spread over files
//! and operators.
//!
//! cargo run --example baseline -- [PROJECT] [N] [SEED]

use std::collections::BTreeMap;
use std::path::Path;

use faultinject::corpus::load_suite;
use faultinject::injector::{baseline_pool, inject_baseline, InjectionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let project = args.next().unwrap_or_else(|| "P5".to_string());
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(30);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let suite = load_suite(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/seeded"))?;
    let corpus = suite.project(&project).ok_or(format!("no project {project}"))?;
    let config = InjectionConfig::new(n, seed);
    println!("{} candidate applications", baseline_pool(corpus, &config).len());

    let mutants = inject_baseline(corpus, &config)?;
    let mut by_file: BTreeMap<&str, usize> = BTreeMap::new();
    let mut by_pattern: BTreeMap<&str, usize> = BTreeMap::new();
    for m in &mutants {
        *by_file.entry(m.path()).or_default() += 1;
        *by_pattern.entry(m.pattern_id.as_str()).or_default() += 1;
    }
    println!("{} mutants", mutants.len());
    for (file, count) in by_file {
        println!("  {file:<24} {count}");
    }
    for (pattern, count) in by_pattern {
        println!("  {pattern:<24} {count}");
    }
    Ok(())
}
