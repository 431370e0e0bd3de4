//! Library measures against the brute-force oracles on random inputs.
//! Each check returns the number of inputs compared.

use faultinject::evaluator::{kendall_tau_b, ochiai, pearson_r, vargha_delaney_a12, wilcoxon, WilcoxonMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

pub const TOL: f64 = 1e-9;

fn bools(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(0.4)).collect()
}

/// Small integers so ties are common.
fn values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| f64::from(rng.gen_range(0..6))).collect()
}

fn reals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect()
}

pub fn ochiai_vs_sets(cases: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let n = rng.gen_range(1..15);
        let (m, f) = (bools(&mut rng, n), bools(&mut rng, n));
        let (got, want) = (ochiai(&m, &f).map_err(|e| e.to_string())?, ochiai_sets(&m, &f));
        if !close(got, want, TOL) {
            return Err(format!("ochiai {m:?} {f:?}: {got} vs {want}"));
        }
    }
    Ok(cases)
}

pub fn a12_vs_pairs(cases: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let (n1, n2) = (rng.gen_range(1..10), rng.gen_range(1..10));
        let (g1, g2) = (values(&mut rng, n1), values(&mut rng, n2));
        let (got, want) = (vargha_delaney_a12(&g1, &g2).map_err(|e| e.to_string())?, a12_pairs(&g1, &g2));
        if !close(got, want, TOL) {
            return Err(format!("a12 {g1:?} {g2:?}: {got} vs {want}"));
        }
    }
    Ok(cases)
}

/// Constant inputs must be rejected; they do not count towards `cases`.
pub fn kendall_vs_pairs(cases: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < cases {
        let n = rng.gen_range(2..14);
        let (x, y) = (values(&mut rng, n), values(&mut rng, n));
        match (kendall_pairs(&x, &y), kendall_tau_b(&x, &y)) {
            (Some(want), Ok(got)) if close(got, want, TOL) => checked += 1,
            (None, Err(_)) => {}
            (want, got) => return Err(format!("kendall {x:?} {y:?}: {got:?} vs {want:?}")),
        }
    }
    Ok(checked)
}

pub fn pearson_vs_moments(cases: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < cases {
        let n = rng.gen_range(2..14);
        let (x, y) = if rng.gen_bool(0.5) {
            (values(&mut rng, n), values(&mut rng, n))
        } else {
            (reals(&mut rng, n), reals(&mut rng, n))
        };
        let Some(want) = pearson_moments(&x, &y) else { continue };
        let got = pearson_r(&x, &y).map_err(|e| format!("pearson {x:?} {y:?}: {e}"))?;
        if !close(got, want, TOL) {
            return Err(format!("pearson {x:?} {y:?}: {got} vs {want}"));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Every (n1, n2) with n1 + n2 <= 8, `per_split` random inputs each, half
/// of them heavily tied.
pub fn rank_sum_vs_enumeration(per_split: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    for n1 in 1..8 {
        for n2 in 1..=8 - n1 {
            for _ in 0..per_split {
                let (g1, g2) = if rng.gen_bool(0.5) {
                    (values(&mut rng, n1), values(&mut rng, n2))
                } else {
                    (reals(&mut rng, n1), reals(&mut rng, n2))
                };
                let got = wilcoxon(&g1, &g2, WilcoxonMode::RankSum).map_err(|e| e.to_string())?;
                let want = rank_sum_enumerated(&g1, &g2);
                if !close(got, want, 1e-12) {
                    return Err(format!("rank-sum {g1:?} {g2:?}: {got} vs {want}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

pub fn signed_rank_vs_enumeration(cases: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < cases {
        let n = rng.gen_range(1..11);
        let (g1, g2) = (values(&mut rng, n), values(&mut rng, n));
        if g1 == g2 {
            continue;
        }
        let got = wilcoxon(&g1, &g2, WilcoxonMode::PairedSignedRank).map_err(|e| e.to_string())?;
        let want = signed_rank_enumerated(&g1, &g2);
        if !close(got, want, 1e-12) {
            return Err(format!("signed-rank {g1:?} {g2:?}: {got} vs {want}"));
        }
        checked += 1;
    }
    Ok(checked)
}
