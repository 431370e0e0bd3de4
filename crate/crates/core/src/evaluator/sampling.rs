//! Random reduced test suites drawn from a kill matrix's tests.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::KillMatrix;
use super::EvalError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSample {
    pub sample_id: usize,
    pub test_subset: BTreeSet<String>,
    pub detects_fault: bool,
    /// Fraction of the chosen mutants killed by the subset; 0 until
    /// [`detection_ratio`] fills it in.
    pub detection_ratio: f64,
}

/// Inclusive range of subset sizes allowed by `band` for `total` tests.
pub fn size_range(total: usize, band: (f64, f64)) -> Result<(usize, usize), EvalError> {
    let (lo, hi) = band;
    if !(0.0 < lo && lo <= hi && hi < 1.0) {
        return Err(EvalError::BandEmpty { lo, hi, total });
    }
    let min = (lo * total as f64 - 1e-9).ceil().max(1.0) as usize;
    let max = (hi * total as f64 + 1e-9).floor() as usize;
    if min > max {
        return Err(EvalError::BandEmpty { lo, hi, total });
    }
    Ok((min, max))
}

/// Draws `n_samples` subsets of `tests`: a size uniform in the band, then
/// that many tests without replacement.
pub fn sample_suites(
    tests: &[String],
    fault_failing: &BTreeSet<String>,
    n_samples: usize,
    band: (f64, f64),
    rng: &mut ChaCha8Rng,
) -> Result<Vec<SuiteSample>, EvalError> {
    let (min, max) = size_range(tests.len(), band)?;
    let mut out = Vec::with_capacity(n_samples);
    for sample_id in 0..n_samples {
        let size = rng.gen_range(min..=max);
        let mut picked: Vec<usize> = sample(rng, tests.len(), size).into_vec();
        picked.sort_unstable();
        let test_subset: BTreeSet<String> = picked.iter().map(|&i| tests[i].clone()).collect();
        let detects_fault = test_subset.iter().any(|t| fault_failing.contains(t));
        out.push(SuiteSample { sample_id, test_subset, detects_fault, detection_ratio: 0.0 });
    }
    Ok(out)
}

/// Fraction of `subjects` (matrix column indices) killed by some test in
/// `subset`. An empty subject list gives 0.
pub fn detection_ratio(matrix: &KillMatrix, subjects: &[usize], subset: &BTreeSet<String>) -> f64 {
    if subjects.is_empty() {
        return 0.0;
    }
    let rows: Vec<&Vec<bool>> =
        matrix.tests.iter().zip(&matrix.detect).filter(|(t, _)| subset.contains(*t)).map(|(_, r)| r).collect();
    let killed = subjects.iter().filter(|&&s| rows.iter().any(|r| r[s])).count();
    killed as f64 / subjects.len() as f64
}
