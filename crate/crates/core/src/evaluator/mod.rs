//! Kill matrices and the measures computed from them: similarity to the
//! real fault, coupling, and how sampled-suite detection of mutants tracks
//! detection of the fault.

mod matrix;
mod metrics;
mod report;
mod sampling;
mod wilcoxon;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use matrix::{build_kill_matrix, mutant_budget, passing_tests, KillMatrix};
pub use metrics::{is_coupled, kendall_tau_b, median, ochiai, pearson_r, vargha_delaney_a12};
pub use report::{
    BudgetComparison, BudgetMetrics, EvaluationReport, MutantScore, SampleInfo, SourceMetrics, SourceSummary, Stat,
    SuiteMetrics, TargetInfo, SCHEMA_VERSION,
};
pub use sampling::{detection_ratio, sample_suites, size_range, SuiteSample};
pub use wilcoxon::{wilcoxon, wilcoxon_with_limit, WilcoxonMode, DEFAULT_EXACT_LIMIT};

use crate::corpus::{Corpus, GroundTruthFault};
use crate::injector::{Mutant, MutantSource};
use crate::minij::ExecutionError;
use crate::rng;

pub const DEFAULT_BUDGETS: [usize; 4] = [5, 10, 30, 100];
pub const DEFAULT_SUITE_SAMPLES: usize = 50;
pub const DEFAULT_BAND: (f64, f64) = (0.10, 0.30);

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("empty group")]
    EmptyGroup,
    #[error("no suite size in band ({lo}, {hi}) for {total} tests")]
    BandEmpty { lo: f64, hi: f64, total: usize },
    #[error("unknown test '{0}'")]
    UnknownTest(String),
    #[error("fault {0} is detected by no test that passes on the original program")]
    UndetectedFault(String),
    #[error("mutant {mutant_id} cannot be rebuilt: {reason}")]
    InvalidMutant { mutant_id: String, reason: String },
    #[error(transparent)]
    Execution(#[from] ExecutionError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationConfig {
    pub budgets: Vec<usize>,
    pub n_suite_samples: usize,
    pub sample_band: (f64, f64),
    pub seed: u64,
    /// Sample size up to which Wilcoxon p-values are exact.
    pub exact_limit: usize,
    pub jobs: usize,
}

impl EvaluationConfig {
    pub fn new(seed: u64) -> EvaluationConfig {
        EvaluationConfig {
            budgets: DEFAULT_BUDGETS.to_vec(),
            n_suite_samples: DEFAULT_SUITE_SAMPLES,
            sample_band: DEFAULT_BAND,
            seed,
            exact_limit: DEFAULT_EXACT_LIMIT,
            jobs: 0,
        }
    }
}

/// Mutants of one source for one target, ranked, with the size of the
/// request that produced them.
#[derive(Clone, Debug)]
pub struct MutantSet {
    pub source: MutantSource,
    pub requested: usize,
    pub mutants: Vec<Mutant>,
}

impl MutantSet {
    /// The first `budget` mutants, or `None` when the run asked for fewer.
    pub fn at_budget(&self, budget: usize) -> Option<&[Mutant]> {
        if self.requested < budget {
            return None;
        }
        let n = self.mutants.iter().take_while(|m| m.rank <= budget).count();
        Some(&self.mutants[..n])
    }
}

#[derive(Clone, Debug)]
pub struct TargetEvaluation {
    pub fault_id: String,
    pub info: TargetInfo,
    pub metrics: SourceMetrics,
    pub matrix: KillMatrix,
    /// (source, budget) pairs skipped because too few mutants were requested.
    pub omitted: Vec<(MutantSource, usize)>,
}

fn suite_metrics(
    matrix: &KillMatrix,
    subjects: &[usize],
    samples: &[SuiteSample],
    exact_limit: usize,
) -> SuiteMetrics {
    let ratios: Vec<f64> = samples.iter().map(|s| detection_ratio(matrix, subjects, &s.test_subset)).collect();
    let detects: Vec<f64> = samples.iter().map(|s| f64::from(u8::from(s.detects_fault))).collect();
    let (hit, miss): (Vec<(f64, bool)>, Vec<(f64, bool)>) =
        ratios.iter().zip(samples).map(|(&r, s)| (r, s.detects_fault)).partition(|(_, d)| *d);
    let hit: Vec<f64> = hit.into_iter().map(|(r, _)| r).collect();
    let miss: Vec<f64> = miss.into_iter().map(|(r, _)| r).collect();
    SuiteMetrics {
        kendall_tau_b: kendall_tau_b(&ratios, &detects).into(),
        pearson_r: pearson_r(&ratios, &detects).into(),
        rank_sum_p: wilcoxon_with_limit(&hit, &miss, WilcoxonMode::RankSum, exact_limit).into(),
        a12: vargha_delaney_a12(&hit, &miss).into(),
        detection_ratios: ratios,
    }
}

fn budget_metrics(
    matrix: &KillMatrix,
    mutants: &[Mutant],
    fault_column: &[bool],
    samples: &[SuiteSample],
    exact_limit: usize,
) -> Result<BudgetMetrics, EvalError> {
    let mut scores = Vec::with_capacity(mutants.len());
    let mut subjects = Vec::with_capacity(mutants.len());
    for m in mutants {
        let idx = matrix.subject_index(&m.mutant_id).expect("mutant has a matrix column");
        let col = matrix.column(idx);
        subjects.push(idx);
        scores.push(MutantScore {
            mutant_id: m.mutant_id.clone(),
            ochiai: ochiai(&col, fault_column)?,
            killed: col.iter().any(|&k| k),
            coupled: is_coupled(&col, fault_column)?,
        });
    }
    Ok(BudgetMetrics {
        n_mutants: scores.len(),
        killed: scores.iter().filter(|s| s.killed).count(),
        coupled: scores.iter().filter(|s| s.coupled).count(),
        best_ochiai: scores.iter().map(|s| s.ochiai).fold(0.0, f64::max),
        any_coupled: scores.iter().any(|s| s.coupled),
        suites: suite_metrics(matrix, &subjects, samples, exact_limit),
        mutants: scores,
    })
}

/// Evaluates every available (source, budget) combination for one fault.
/// Suites are sampled once per target so both sources see the same suites.
pub fn evaluate_target(
    corpus: &Corpus,
    fault: &GroundTruthFault,
    sets: &[MutantSet],
    config: &EvaluationConfig,
) -> Result<TargetEvaluation, EvalError> {
    let all: Vec<Mutant> = sets.iter().flat_map(|s| s.mutants.iter().cloned()).collect();
    let matrix = build_kill_matrix(corpus, &all, fault, config.jobs)?;
    let fault_column = matrix.column(matrix.subjects.len() - 1);
    if !fault_column.iter().any(|&d| d) {
        return Err(EvalError::UndetectedFault(fault.fault_id.clone()));
    }
    let failing: BTreeSet<String> = fault.failing_tests.iter().cloned().collect();
    let mut stream = rng::stream(config.seed, &format!("{}/{}", rng::SUITE_SAMPLING, fault.fault_id));
    let samples = sample_suites(&matrix.tests, &failing, config.n_suite_samples, config.sample_band, &mut stream)?;

    let mut metrics: SourceMetrics = BTreeMap::new();
    let mut omitted = Vec::new();
    for set in sets {
        for &b in &config.budgets {
            match set.at_budget(b) {
                Some(ms) => {
                    let m = budget_metrics(&matrix, ms, &fault_column, &samples, config.exact_limit)?;
                    metrics.entry(set.source).or_default().insert(b, m);
                }
                None => omitted.push((set.source, b)),
            }
        }
    }
    let report_id = fault.bug_report_id.clone();
    let info = TargetInfo {
        project: corpus.name.clone(),
        report_id,
        tests: matrix.tests.len(),
        failing_tests: fault.failing_tests.clone(),
        samples: samples
            .iter()
            .map(|s| SampleInfo { sample_id: s.sample_id, size: s.test_subset.len(), detects_fault: s.detects_fault })
            .collect(),
    };
    Ok(TargetEvaluation { fault_id: fault.fault_id.clone(), info, metrics, matrix, omitted })
}

fn source_summary(best: &[(String, f64)], coupled: usize) -> SourceSummary {
    let values: Vec<f64> = best.iter().map(|(_, v)| *v).collect();
    SourceSummary {
        targets: values.len(),
        median_best_ochiai: Stat(median(&values)),
        coupled_targets: coupled,
        coupled_fraction: Stat((!values.is_empty()).then(|| coupled as f64 / values.len() as f64)),
    }
}

/// Assembles per-target results into a report with cross-target comparisons.
pub fn build_report(targets: &[TargetEvaluation], config: &EvaluationConfig) -> EvaluationReport {
    let faults: BTreeMap<String, SourceMetrics> =
        targets.iter().map(|t| (t.fault_id.clone(), t.metrics.clone())).collect();
    let infos = targets.iter().map(|t| (t.fault_id.clone(), t.info.clone())).collect();
    let mut report = EvaluationReport {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        budgets: config.budgets.clone(),
        faults,
        targets: infos,
        comparisons: Vec::new(),
    };
    for &b in &config.budgets {
        let mut sources = BTreeMap::new();
        for source in MutantSource::ALL {
            let best = report.best_ochiai(source, b);
            if best.is_empty() {
                continue;
            }
            let coupled = report.faults.values().filter(|s| s.get(&source).and_then(|m| m.get(&b)).is_some_and(|m| m.any_coupled)).count();
            sources.insert(source, source_summary(&best, coupled));
        }
        if sources.is_empty() {
            continue;
        }
        let ibir: BTreeMap<String, f64> = report.best_ochiai(MutantSource::Ibir, b).into_iter().collect();
        let base: BTreeMap<String, f64> = report.best_ochiai(MutantSource::Baseline, b).into_iter().collect();
        let paired: Vec<(f64, f64)> = ibir.iter().filter_map(|(f, v)| base.get(f).map(|w| (*v, *w))).collect();
        let (pi, pb): (Vec<f64>, Vec<f64>) = paired.iter().copied().unzip();
        let iv: Vec<f64> = ibir.values().copied().collect();
        let bv: Vec<f64> = base.values().copied().collect();
        report.comparisons.push(BudgetComparison {
            budget: b,
            sources,
            paired_targets: paired.len(),
            best_ochiai_paired_p: wilcoxon_with_limit(&pi, &pb, WilcoxonMode::PairedSignedRank, config.exact_limit).into(),
            best_ochiai_rank_sum_p: wilcoxon_with_limit(&iv, &bv, WilcoxonMode::RankSum, config.exact_limit).into(),
            best_ochiai_a12: vargha_delaney_a12(&iv, &bv).into(),
        });
    }
    report
}
