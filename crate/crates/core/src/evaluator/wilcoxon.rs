//! Two-sided Wilcoxon tests: exact null distribution for small samples,
//! normal approximation with tie and continuity corrections otherwise.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::metrics::midranks;
use super::EvalError;

/// Largest sample size (combined for rank-sum, nonzero pairs for signed-rank)
/// that gets an exact p-value.
pub const DEFAULT_EXACT_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMode {
    PairedSignedRank,
    RankSum,
}

pub fn wilcoxon(g1: &[f64], g2: &[f64], mode: WilcoxonMode) -> Result<f64, EvalError> {
    wilcoxon_with_limit(g1, g2, mode, DEFAULT_EXACT_LIMIT)
}

pub fn wilcoxon_with_limit(g1: &[f64], g2: &[f64], mode: WilcoxonMode, exact_limit: usize) -> Result<f64, EvalError> {
    match mode {
        WilcoxonMode::RankSum => rank_sum(g1, g2, exact_limit),
        WilcoxonMode::PairedSignedRank => signed_rank(g1, g2, exact_limit),
    }
}

/// Midranks doubled so every rank is an integer.
fn doubled(ranks: &[f64]) -> Vec<usize> {
    ranks.iter().map(|r| (r * 2.0).round() as usize).collect()
}

fn tie_term(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        total += t * t * t - t;
        i = j + 1;
    }
    total
}

fn normal_two_sided(deviation: f64, variance: f64) -> f64 {
    if variance <= 0.0 {
        return 1.0;
    }
    let z = ((deviation.abs() - 0.5).max(0.0)) / variance.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Two-sided p from a null distribution of (doubled) statistic values given
/// as counts, all arrangements equally likely.
fn exact_two_sided(counts: &[f64], observed: usize, center2: usize) -> f64 {
    // center2 is twice the mean, in doubled units.
    let total: f64 = counts.iter().sum();
    let dev = (2 * observed).abs_diff(center2);
    let extreme: f64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (2 * s).abs_diff(center2) >= dev)
        .map(|(_, c)| c)
        .sum();
    (extreme / total).min(1.0)
}

fn rank_sum(g1: &[f64], g2: &[f64], exact_limit: usize) -> Result<f64, EvalError> {
    if g1.is_empty() || g2.is_empty() {
        return Err(EvalError::DegenerateInput("rank-sum test with an empty group".into()));
    }
    let combined: Vec<f64> = g1.iter().chain(g2).copied().collect();
    let ranks = midranks(&combined);
    let (n1, n2) = (g1.len(), g2.len());
    let n = n1 + n2;
    if n <= exact_limit {
        let d = doubled(&ranks);
        let max_sum: usize = d.iter().sum();
        // ways[k][s]: subsets of size k with doubled rank sum s.
        let mut ways = vec![vec![0.0f64; max_sum + 1]; n1 + 1];
        ways[0][0] = 1.0;
        for &r in &d {
            for k in (1..=n1).rev() {
                for s in (r..=max_sum).rev() {
                    let add = ways[k - 1][s - r];
                    if add != 0.0 {
                        ways[k][s] += add;
                    }
                }
            }
        }
        let observed: usize = d[..n1].iter().sum();
        // Mean of the doubled sum is n1 * (n + 1); twice that is the center.
        return Ok(exact_two_sided(&ways[n1], observed, 2 * n1 * (n + 1)));
    }
    let w: f64 = ranks[..n1].iter().sum();
    let (n1f, n2f, nf) = (n1 as f64, n2 as f64, n as f64);
    let mean = n1f * (nf + 1.0) / 2.0;
    let variance = n1f * n2f / 12.0 * ((nf + 1.0) - tie_term(&combined) / (nf * (nf - 1.0)));
    Ok(normal_two_sided(w - mean, variance))
}

fn signed_rank(g1: &[f64], g2: &[f64], exact_limit: usize) -> Result<f64, EvalError> {
    if g1.len() != g2.len() {
        return Err(EvalError::LengthMismatch { left: g1.len(), right: g2.len() });
    }
    let diffs: Vec<f64> = g1.iter().zip(g2).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(EvalError::DegenerateInput("signed-rank test with no nonzero differences".into()));
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let n = diffs.len();
    if n <= exact_limit {
        let d = doubled(&ranks);
        let max_sum: usize = d.iter().sum();
        let mut ways = vec![0.0f64; max_sum + 1];
        ways[0] = 1.0;
        for &r in &d {
            for s in (r..=max_sum).rev() {
                ways[s] += ways[s - r];
            }
        }
        let observed: usize = d.iter().zip(&diffs).filter(|(_, x)| **x > 0.0).map(|(r, _)| r).sum();
        return Ok(exact_two_sided(&ways, observed, max_sum));
    }
    let w: f64 = ranks.iter().zip(&diffs).filter(|(_, x)| **x > 0.0).map(|(r, _)| r).sum();
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term(&abs) / 48.0;
    Ok(normal_two_sided(w - mean, variance))
}
