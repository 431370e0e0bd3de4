//! Brute-force reference implementations and fixture helpers shared by the
//! integration tests. Everything here favours obviousness over speed.

#![allow(dead_code)]

pub mod agreement;
pub mod gen;
pub mod invariants;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use faultinject::corpus::{load_suite, Suite};

pub fn seeded_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/seeded")
}

pub fn seeded() -> Suite {
    load_suite(&seeded_root()).expect("seeded suite loads")
}

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// |M ∩ F| / sqrt(|M| |F|) computed on index sets.
pub fn ochiai_sets(mutant: &[bool], fault: &[bool]) -> f64 {
    let m: BTreeSet<usize> = (0..mutant.len()).filter(|&i| mutant[i]).collect();
    let f: BTreeSet<usize> = (0..fault.len()).filter(|&i| fault[i]).collect();
    if m.is_empty() || f.is_empty() {
        return 0.0;
    }
    m.intersection(&f).count() as f64 / ((m.len() * f.len()) as f64).sqrt()
}

/// Share of (a, b) pairs with a > b, ties counted as one half.
pub fn a12_pairs(g1: &[f64], g2: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &a in g1 {
        for &b in g2 {
            if a > b {
                wins += 1.0;
            } else if a == b {
                wins += 0.5;
            }
        }
    }
    wins / (g1.len() * g2.len()) as f64
}

/// Tau-b from explicit pair classification. `None` when either side is constant.
pub fn kendall_pairs(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut concordant, mut discordant, mut tied_x, mut tied_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 {
                tied_x += 1;
            }
            if dy == 0.0 {
                tied_y += 1;
            }
            if dx * dy > 0.0 {
                concordant += 1;
            } else if dx * dy < 0.0 {
                discordant += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    if tied_x == n0 || tied_y == n0 {
        return None;
    }
    Some((concordant - discordant) as f64 / (((n0 - tied_x) * (n0 - tied_y)) as f64).sqrt())
}

/// Pearson r from raw moments. `None` for a zero-variance side.
pub fn pearson_moments(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let vx = n * sxx - sx * sx;
    let vy = n * syy - sy * sy;
    if vx.abs() < 1e-12 || vy.abs() < 1e-12 {
        return None;
    }
    Some((n * sxy - sx * sy) / (vx * vy).sqrt())
}

/// 1-based average ranks by counting, in input order.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            let below = values.iter().filter(|w| *w < v).count() as f64;
            let equal = values.iter().filter(|w| *w == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Two-sided exact rank-sum p: every way of choosing which pooled
/// observations belong to the first group is equally likely.
pub fn rank_sum_enumerated(g1: &[f64], g2: &[f64]) -> f64 {
    let pooled: Vec<f64> = g1.iter().chain(g2).copied().collect();
    let ranks = average_ranks(&pooled);
    let n1 = g1.len();
    let mean = n1 as f64 * (pooled.len() + 1) as f64 / 2.0;
    let observed: f64 = ranks[..n1].iter().sum::<f64>() - mean;
    let all = combinations(pooled.len(), n1);
    let extreme = all
        .iter()
        .filter(|c| (c.iter().map(|&i| ranks[i]).sum::<f64>() - mean).abs() >= observed.abs() - 1e-9)
        .count();
    extreme as f64 / all.len() as f64
}

/// Two-sided exact signed-rank p over all sign assignments of the nonzero
/// differences.
pub fn signed_rank_enumerated(g1: &[f64], g2: &[f64]) -> f64 {
    let diffs: Vec<f64> = g1.iter().zip(g2).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let n = diffs.len();
    let mean = ranks.iter().sum::<f64>() / 2.0;
    let observed: f64 = ranks.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum::<f64>() - mean;
    let mut extreme = 0usize;
    for mask in 0..(1u32 << n) {
        let w: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        if (w - mean).abs() >= observed.abs() - 1e-9 {
            extreme += 1;
        }
    }
    extreme as f64 / (1u64 << n) as f64
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
