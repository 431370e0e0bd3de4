//! Kill matrices: which tests detect which program variants.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::EvalError;
use crate::corpus::{Corpus, GroundTruthFault};
use crate::injector::Mutant;
use crate::minij::interp::DEFAULT_MAX_STEPS;
use crate::minij::{parse, run_tests, run_tests_budgeted, Program, StepBudget};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillMatrix {
    pub tests: Vec<String>,
    pub subjects: Vec<String>,
    /// `detect[t][s]`: test `t` fails on subject `s`.
    pub detect: Vec<Vec<bool>>,
}

impl KillMatrix {
    pub fn subject_index(&self, id: &str) -> Option<usize> {
        self.subjects.iter().position(|s| s == id)
    }

    pub fn column(&self, subject: usize) -> Vec<bool> {
        self.detect.iter().map(|row| row[subject]).collect()
    }

    pub fn column_of(&self, id: &str) -> Option<Vec<bool>> {
        self.subject_index(id).map(|i| self.column(i))
    }

    /// CSV with a `test` column followed by one 0/1 column per subject.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("test");
        for s in &self.subjects {
            out.push(',');
            out.push_str(s);
        }
        out.push('\n');
        for (t, row) in self.tests.iter().zip(&self.detect) {
            out.push_str(t);
            for &d in row {
                out.push_str(if d { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }
}

/// Step budget for a test on a mutant, given its steps on the original: a
/// mutant running ten times longer than the original is taken as hung.
pub fn mutant_budget(original_steps: u64) -> StepBudget {
    StepBudget { max_steps: (original_steps * 10 + 10_000).min(DEFAULT_MAX_STEPS) }
}

/// Tests that pass on the unmodified program, in corpus order, each with the
/// budget it gets on mutants.
pub fn passing_tests(corpus: &Corpus) -> Result<Vec<(String, StepBudget)>, EvalError> {
    Ok(run_tests(&corpus.program, None, StepBudget::default())?
        .into_iter()
        .filter(|v| v.passed())
        .map(|v| (v.test_name, mutant_budget(v.steps)))
        .collect())
}

fn mutant_program(corpus: &Corpus, mutant: &Mutant) -> Result<Program, EvalError> {
    let invalid = |reason: String| EvalError::InvalidMutant { mutant_id: mutant.mutant_id.clone(), reason };
    let unit = parse(&mutant.mutated_source).map_err(|e| invalid(e.to_string()))?;
    if corpus.unit(mutant.path()).is_none() {
        return Err(invalid(format!("no source file {}", mutant.path())));
    }
    let mut program = corpus.program.with_unit(mutant.path(), unit);
    program.check().map_err(|e| invalid(e.to_string()))?;
    Ok(program)
}

fn kill_column(corpus: &Corpus, mutant: &Mutant, tests: &[(String, StepBudget)]) -> Result<Vec<bool>, EvalError> {
    let program = mutant_program(corpus, mutant)?;
    Ok(run_tests_budgeted(&program, tests)?.into_iter().map(|v| !v.passed()).collect())
}

/// Runs every test that passes on the original against every mutant, each
/// under [`mutant_budget`]. The
/// last column is the ground-truth fault, filled from its failing tests.
/// Mutant columns are computed on up to `jobs` threads (0 picks a default).
pub fn build_kill_matrix(
    corpus: &Corpus,
    mutants: &[Mutant],
    fault: &GroundTruthFault,
    jobs: usize,
) -> Result<KillMatrix, EvalError> {
    let tests = passing_tests(corpus)?;
    let failing: BTreeSet<&str> = fault.failing_tests.iter().map(String::as_str).collect();
    let known: BTreeSet<String> = corpus.test_names().into_iter().collect();
    if let Some(unknown) = fault.failing_tests.iter().find(|t| !known.contains(*t)) {
        return Err(EvalError::UnknownTest(unknown.clone()));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    let columns: Vec<Vec<bool>> =
        pool.install(|| mutants.par_iter().map(|m| kill_column(corpus, m, &tests)).collect::<Result<_, _>>())?;
    let fault_column: Vec<bool> = tests.iter().map(|(t, _)| failing.contains(t.as_str())).collect();
    let tests: Vec<String> = tests.into_iter().map(|(t, _)| t).collect();
    let mut subjects: Vec<String> = mutants.iter().map(|m| m.mutant_id.clone()).collect();
    subjects.push(fault.fault_id.clone());
    let detect = (0..tests.len())
        .map(|t| columns.iter().map(|c| c[t]).chain(std::iter::once(fault_column[t])).collect())
        .collect();
    Ok(KillMatrix { tests, subjects, detect })
}
