//! The injection loop: localize, match, apply in ranked order, keep what
//! type checks. Also the random classical-mutation baseline.

mod store;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use similar::TextDiff;
use thiserror::Error;

pub use store::{read_mutants, write_mutants, MutantMeta, StoreError};

use crate::corpus::{BugReport, Corpus, StatementId};
use crate::irloc::{LocalizeError, Localizer};
use crate::minij::{check_replacement, unparse_unit};
use crate::patterns::{apply_pattern, match_statement, Catalog, MatchContext, PatternApplication, PatternKind};
use crate::rng;

pub const DEFAULT_TOP_FILES: usize = 20;
pub const DEFAULT_TOP_STATEMENTS: usize = 50;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InjectError {
    #[error(transparent)]
    Localize(#[from] LocalizeError),
    #[error("no viable mutants: every candidate was stillborn or a no-op")]
    NoViableMutants,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutantSource {
    Ibir,
    Baseline,
}

impl MutantSource {
    pub const ALL: [MutantSource; 2] = [MutantSource::Ibir, MutantSource::Baseline];

    pub fn as_str(self) -> &'static str {
        match self {
            MutantSource::Ibir => "ibir",
            MutantSource::Baseline => "baseline",
        }
    }
}

impl fmt::Display for MutantSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutantStatus {
    Viable,
    Stillborn,
    Noop,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InjectionConfig {
    pub n_faults: usize,
    pub top_files: usize,
    pub top_statements: usize,
    /// Restrict mutation to these production files.
    pub scope: Option<BTreeSet<String>>,
    pub seed: u64,
    /// Worker threads for applying and checking candidates; 0 picks a default.
    pub jobs: usize,
    pub catalog: Catalog,
}

impl InjectionConfig {
    pub fn new(n_faults: usize, seed: u64) -> InjectionConfig {
        InjectionConfig {
            n_faults,
            top_files: DEFAULT_TOP_FILES,
            top_statements: DEFAULT_TOP_STATEMENTS,
            scope: None,
            seed,
            jobs: 0,
            catalog: Catalog::builtin(),
        }
    }

    fn validate(&self) -> Result<(), InjectError> {
        if self.n_faults == 0 {
            return Err(InjectError::InvalidConfig("n_faults must be at least 1".into()));
        }
        if self.top_files == 0 || self.top_statements == 0 {
            return Err(InjectError::InvalidConfig("top_files and top_statements must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mutant {
    pub mutant_id: String,
    pub source: MutantSource,
    pub project: String,
    /// The report that drove injection; `None` for baseline mutants.
    pub report_id: Option<String>,
    pub statement: StatementId,
    pub node: Vec<usize>,
    pub pattern_id: String,
    pub donor: Option<String>,
    /// 1-based emission order.
    pub rank: usize,
    /// IRFL rank of the mutated statement (ibir only).
    pub location_rank: Option<usize>,
    pub status: MutantStatus,
    /// Canonical text of the whole mutated file.
    pub mutated_source: String,
    pub diff: String,
}

impl Mutant {
    pub fn path(&self) -> &str {
        &self.statement.path
    }
}

/// Unified diff between two versions of `path`.
pub fn unified_diff(path: &str, before: &str, after: &str) -> String {
    TextDiff::from_lines(before, after)
        .unified_diff()
        .context_radius(3)
        .header(&format!("a/{path}"), &format!("b/{path}"))
        .to_string()
}

struct Realized {
    mutated_source: String,
    diff: String,
}

fn realize(corpus: &Corpus, originals: &BTreeMap<String, String>, app: &PatternApplication) -> Option<Realized> {
    let path = &app.statement.path;
    let unit = corpus.unit(path)?;
    let mut mutated = apply_pattern(unit, app).ok()?;
    check_replacement(path, &mut mutated, &corpus.symbols).ok()?;
    let text = unparse_unit(&mutated);
    let diff = unified_diff(path, &originals[path], &text);
    Some(Realized { mutated_source: text, diff })
}

fn thread_pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool")
}

/// Walks candidates in order, keeping viable mutants with distinct diffs
/// until `n` are found. Work is done in parallel chunks; the outcome does
/// not depend on the number of threads.
fn select(
    corpus: &Corpus,
    candidates: &[(PatternApplication, Option<usize>)],
    n: usize,
    jobs: usize,
) -> Vec<(usize, Realized)> {
    let originals: BTreeMap<String, String> = corpus
        .sources
        .iter()
        .map(|f| (f.path.clone(), unparse_unit(corpus.unit(&f.path).expect("source unit"))))
        .collect();
    let pool = thread_pool(jobs);
    let chunk = 16 * pool.current_num_threads().max(1);
    let mut seen: HashSet<String> = HashSet::new();
    let mut out = Vec::new();
    for (c, part) in candidates.chunks(chunk).enumerate() {
        let results: Vec<Option<Realized>> =
            pool.install(|| part.par_iter().map(|(app, _)| realize(corpus, &originals, app)).collect());
        for (i, r) in results.into_iter().enumerate() {
            let Some(r) = r else { continue };
            if seen.insert(r.diff.clone()) {
                out.push((c * chunk + i, r));
                if out.len() == n {
                    return out;
                }
            }
        }
    }
    out
}

fn build(
    corpus: &Corpus,
    source: MutantSource,
    report: Option<&BugReport>,
    seed: u64,
    candidates: &[(PatternApplication, Option<usize>)],
    chosen: Vec<(usize, Realized)>,
) -> Vec<Mutant> {
    chosen
        .into_iter()
        .enumerate()
        .map(|(i, (at, r))| {
            let (app, location_rank) = &candidates[at];
            let rank = i + 1;
            Mutant {
                mutant_id: format!("{source}-{seed}-{rank}"),
                source,
                project: corpus.name.clone(),
                report_id: report.map(|r| r.id.clone()),
                statement: app.statement.clone(),
                node: app.node.clone(),
                pattern_id: app.pattern_id().to_string(),
                donor: app.donor.clone(),
                rank,
                location_rank: *location_rank,
                status: MutantStatus::Viable,
                mutated_source: r.mutated_source,
                diff: r.diff,
            }
        })
        .collect()
}

/// Ranked, compile-filtered fault injection driven by a bug report.
pub fn inject(corpus: &Corpus, report: &BugReport, config: &InjectionConfig) -> Result<Vec<Mutant>, InjectError> {
    config.validate()?;
    let localizer = Localizer::new(corpus)?;
    let ranked = localizer.localize(report, config.top_files, config.top_statements, config.scope.as_ref())?;

    let mut contexts: BTreeMap<&str, MatchContext<'_>> = BTreeMap::new();
    let mut candidates: Vec<(PatternApplication, Option<usize>)> = Vec::new();
    for loc in &ranked {
        let path = loc.statement.path.as_str();
        if !contexts.contains_key(path) {
            let unit = corpus.unit(path).expect("ranked statement belongs to a source file");
            contexts.insert(path, MatchContext::new(path, unit, &corpus.symbols));
        }
        let mut apps = match_statement(&contexts[path], &config.catalog, loc.statement.index);
        apps.sort_by_key(|a| (a.priority, a.bfs_index, a.donor_index));
        candidates.extend(apps.into_iter().map(|a| (a, Some(loc.rank))));
    }

    let chosen = select(corpus, &candidates, config.n_faults, config.jobs);
    if chosen.is_empty() {
        return Err(InjectError::NoViableMutants);
    }
    Ok(build(corpus, MutantSource::Ibir, Some(report), config.seed, &candidates, chosen))
}

/// Every baseline candidate over the in-scope statements, in statement order.
pub fn baseline_pool(corpus: &Corpus, config: &InjectionConfig) -> Vec<PatternApplication> {
    let catalog = config.catalog.restricted_to(PatternKind::BASELINE);
    let mut pool = Vec::new();
    for f in &corpus.sources {
        if config.scope.as_ref().is_some_and(|s| !s.contains(&f.path)) {
            continue;
        }
        let unit = corpus.unit(&f.path).expect("source unit");
        let cx = MatchContext::new(&f.path, unit, &corpus.symbols);
        for i in 0..cx.statement_count() {
            pool.extend(match_statement(&cx, &catalog, i));
        }
    }
    pool
}

/// Random sample of classical mutants. Candidates are visited in a seeded
/// random order, so stillborn draws are replaced by the next draw.
pub fn inject_baseline(corpus: &Corpus, config: &InjectionConfig) -> Result<Vec<Mutant>, InjectError> {
    config.validate()?;
    let mut pool = baseline_pool(corpus, config);
    let mut rng = rng::stream(config.seed, rng::BASELINE_SAMPLING);
    pool.shuffle(&mut rng);
    let candidates: Vec<(PatternApplication, Option<usize>)> = pool.into_iter().map(|a| (a, None)).collect();
    let chosen = select(corpus, &candidates, config.n_faults, config.jobs);
    if chosen.is_empty() {
        return Err(InjectError::NoViableMutants);
    }
    Ok(build(corpus, MutantSource::Baseline, None, config.seed, &candidates, chosen))
}
