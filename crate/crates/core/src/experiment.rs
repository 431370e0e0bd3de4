//! End-to-end runs over a suite: inject mutants for every linked report
//! with both sources, then evaluate them against the ground-truth faults.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{load_suite, BugReport, Corpus, CorpusError, GroundTruthFault, Suite};
use crate::evaluator::{
    build_report, evaluate_target, EvalError, EvaluationConfig, EvaluationReport, KillMatrix, MutantSet,
    TargetEvaluation, DEFAULT_BAND, DEFAULT_BUDGETS, DEFAULT_EXACT_LIMIT, DEFAULT_SUITE_SAMPLES,
};
use crate::injector::{inject, inject_baseline, InjectError, InjectionConfig, Mutant, MutantSource};
use crate::injector::{DEFAULT_TOP_FILES, DEFAULT_TOP_STATEMENTS};
use crate::patterns::{Catalog, CatalogError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("{report}: {source}")]
    Inject { report: String, source: InjectError },
    #[error("{fault}: {source}")]
    Eval { fault: String, source: EvalError },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScopeMode {
    /// Mutate anywhere in the project.
    #[default]
    Project,
    /// Mutate only the files the ground-truth fix touched.
    TargetFile,
}

fn default_budgets() -> Vec<usize> {
    DEFAULT_BUDGETS.to_vec()
}
fn default_samples() -> usize {
    DEFAULT_SUITE_SAMPLES
}
fn default_band() -> (f64, f64) {
    DEFAULT_BAND
}
fn default_top_files() -> usize {
    DEFAULT_TOP_FILES
}
fn default_top_statements() -> usize {
    DEFAULT_TOP_STATEMENTS
}
fn default_exact_limit() -> usize {
    DEFAULT_EXACT_LIMIT
}

/// Experiment settings; every field can come from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub corpus_root: PathBuf,
    #[serde(default = "default_budgets")]
    pub budgets: Vec<usize>,
    #[serde(default = "default_samples")]
    pub n_suite_samples: usize,
    #[serde(default = "default_band")]
    pub sample_band: (f64, f64),
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub scope_mode: ScopeMode,
    #[serde(default = "default_top_files")]
    pub top_files: usize,
    #[serde(default = "default_top_statements")]
    pub top_statements: usize,
    #[serde(default = "default_exact_limit")]
    pub exact_limit: usize,
    /// Pattern catalog overriding the bundled one.
    #[serde(default)]
    pub catalog: Option<PathBuf>,
    #[serde(default)]
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            corpus_root: PathBuf::new(),
            budgets: default_budgets(),
            n_suite_samples: default_samples(),
            sample_band: default_band(),
            seed: 0,
            scope_mode: ScopeMode::Project,
            top_files: default_top_files(),
            top_statements: default_top_statements(),
            exact_limit: default_exact_limit(),
            catalog: None,
            jobs: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, ExperimentError> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        ExperimentConfig::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.budgets.is_empty() || self.budgets[0] == 0 || self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::Config("budgets must be strictly increasing positive integers".into()));
        }
        let (lo, hi) = self.sample_band;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return Err(ExperimentError::Config(format!("sample_band ({lo}, {hi}) must satisfy 0 < lo <= hi < 1")));
        }
        if self.top_files == 0 || self.top_statements == 0 {
            return Err(ExperimentError::Config("top_files and top_statements must be at least 1".into()));
        }
        Ok(())
    }

    pub fn catalog(&self) -> Result<Catalog, ExperimentError> {
        Ok(match &self.catalog {
            Some(p) => Catalog::load(p)?,
            None => Catalog::builtin(),
        })
    }

    pub fn evaluation(&self) -> EvaluationConfig {
        EvaluationConfig {
            budgets: self.budgets.clone(),
            n_suite_samples: self.n_suite_samples,
            sample_band: self.sample_band,
            seed: self.seed,
            exact_limit: self.exact_limit,
            jobs: self.jobs,
        }
    }

    /// Injection settings for one report; `n` mutants requested.
    pub fn injection(&self, catalog: &Catalog, fault: Option<&GroundTruthFault>, n: usize) -> InjectionConfig {
        let mut c = InjectionConfig::new(n, self.seed);
        c.top_files = self.top_files;
        c.top_statements = self.top_statements;
        c.jobs = self.jobs;
        c.catalog = catalog.clone();
        if self.scope_mode == ScopeMode::TargetFile {
            c.scope = fault.map(|f| f.fixed_files());
        }
        c
    }

    /// Mutants requested per source: enough for the largest budget.
    pub fn n_faults(&self) -> usize {
        self.budgets.last().copied().unwrap_or(0)
    }
}

/// One report with a linked fault, and where it lives.
pub struct Target<'a> {
    pub corpus: &'a Corpus,
    pub report: &'a BugReport,
    pub fault: &'a GroundTruthFault,
}

/// Reports that link to a ground-truth fault, in project then report order.
pub fn targets(suite: &Suite) -> Vec<Target<'_>> {
    suite
        .reports()
        .filter_map(|(corpus, report)| corpus.fault_for_report(report).map(|fault| Target { corpus, report, fault }))
        .collect()
}

/// Both mutant sets for one target.
pub fn inject_target(
    target: &Target<'_>,
    config: &ExperimentConfig,
    catalog: &Catalog,
) -> Result<Vec<MutantSet>, ExperimentError> {
    let n = config.n_faults();
    let cfg = config.injection(catalog, Some(target.fault), n);
    let wrap = |source| ExperimentError::Inject { report: target.report.id.clone(), source };
    let ibir = inject(target.corpus, target.report, &cfg).map_err(wrap)?;
    let mut baseline = inject_baseline(target.corpus, &cfg).map_err(wrap)?;
    for m in &mut baseline {
        m.report_id = Some(target.report.id.clone());
    }
    Ok(vec![
        MutantSet { source: MutantSource::Ibir, requested: n, mutants: ibir },
        MutantSet { source: MutantSource::Baseline, requested: n, mutants: baseline },
    ])
}

pub struct ExperimentOutcome {
    pub report: EvaluationReport,
    pub targets: Vec<TargetEvaluation>,
    /// Every mutant injected, grouped per target as (report id, sets).
    pub mutants: Vec<(String, Vec<MutantSet>)>,
}

impl ExperimentOutcome {
    pub fn matrix(&self, fault_id: &str) -> Option<&KillMatrix> {
        self.targets.iter().find(|t| t.fault_id == fault_id).map(|t| &t.matrix)
    }
}

/// Injects and evaluates every target of an already loaded suite.
pub fn run_suite(suite: &Suite, config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    config.validate()?;
    let catalog = config.catalog()?;
    let eval = config.evaluation();
    let mut evaluations = Vec::new();
    let mut mutants = Vec::new();
    for target in targets(suite) {
        let sets = inject_target(&target, config, &catalog)?;
        let evaluation = evaluate_target(target.corpus, target.fault, &sets, &eval)
            .map_err(|source| ExperimentError::Eval { fault: target.fault.fault_id.clone(), source })?;
        evaluations.push(evaluation);
        mutants.push((target.report.id.clone(), sets));
    }
    let report = build_report(&evaluations, &eval);
    Ok(ExperimentOutcome { report, targets: evaluations, mutants })
}

/// Loads `config.corpus_root` and runs the full pipeline on it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    let suite = load_suite(&config.corpus_root)?;
    run_suite(&suite, config)
}

/// Flattens every set into one list, for writing to disk.
pub fn all_mutants(sets: &[MutantSet]) -> Vec<Mutant> {
    sets.iter().flat_map(|s| s.mutants.iter().cloned()).collect()
}

/// Assigns mutants loaded from disk to targets. A mutant belongs to the
/// target of its report; a baseline mutant without a report belongs to
/// every target of its project. Targets without mutants are left out.
pub fn group_mutants<'a>(
    suite: &'a Suite,
    loaded: &[(Mutant, usize)],
) -> Result<Vec<(Target<'a>, Vec<MutantSet>)>, ExperimentError> {
    let mut out = Vec::new();
    for target in targets(suite) {
        let mut sets: Vec<MutantSet> = Vec::new();
        for source in MutantSource::ALL {
            let own: Vec<&(Mutant, usize)> = loaded
                .iter()
                .filter(|(m, _)| m.source == source && m.report_id.as_deref() == Some(target.report.id.as_str()))
                .collect();
            let chosen: Vec<&(Mutant, usize)> = if own.is_empty() && source == MutantSource::Baseline {
                loaded
                    .iter()
                    .filter(|(m, _)| m.source == source && m.report_id.is_none() && m.project == target.corpus.name)
                    .collect()
            } else {
                own
            };
            if chosen.is_empty() {
                continue;
            }
            let mut ranks = BTreeSet::new();
            for (m, _) in &chosen {
                if !ranks.insert(m.rank) {
                    return Err(ExperimentError::Config(format!(
                        "{} has two {source} mutants of rank {}",
                        target.report.id, m.rank
                    )));
                }
            }
            let requested = chosen.iter().map(|(_, r)| *r).min().unwrap_or(0);
            let mut mutants: Vec<Mutant> = chosen.into_iter().map(|(m, _)| m.clone()).collect();
            mutants.sort_by_key(|m| m.rank);
            sets.push(MutantSet { source, requested, mutants });
        }
        if !sets.is_empty() {
            out.push((target, sets));
        }
    }
    Ok(out)
}
