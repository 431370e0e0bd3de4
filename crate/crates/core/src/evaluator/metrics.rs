//! Similarity, coupling, correlation and effect-size measures.

use super::EvalError;

fn check_lengths(a: usize, b: usize) -> Result<(), EvalError> {
    if a != b {
        return Err(EvalError::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// Ochiai coefficient |M∩F| / sqrt(|M|·|F|) between two detection columns.
/// An undetected mutant scores 0.
pub fn ochiai(mutant: &[bool], fault: &[bool]) -> Result<f64, EvalError> {
    check_lengths(mutant.len(), fault.len())?;
    let (mut both, mut m, mut f) = (0usize, 0usize, 0usize);
    for (&a, &b) in mutant.iter().zip(fault) {
        m += usize::from(a);
        f += usize::from(b);
        both += usize::from(a && b);
    }
    if m == 0 || f == 0 {
        return Ok(0.0);
    }
    Ok(both as f64 / ((m * f) as f64).sqrt())
}

/// Killed by at least one fault-detecting test and by no other test.
pub fn is_coupled(mutant: &[bool], fault: &[bool]) -> Result<bool, EvalError> {
    check_lengths(mutant.len(), fault.len())?;
    let killed = mutant.iter().any(|&k| k);
    Ok(killed && mutant.iter().zip(fault).all(|(&m, &f)| !m || f))
}

/// Sum of t(t-1)/2 over runs of equal values in a sorted slice.
fn tied_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for i in 1..=sorted.len() {
        if i < sorted.len() && sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total
}

/// Sorts `v` and returns the number of inversions (strictly decreasing pairs).
fn merge_count(v: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid]) + merge_count(&mut v[mid..]);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            swaps += (mid - i) as u64;
            merged.push(v[j]);
            j += 1;
        } else {
            merged.push(v[i]);
            i += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..]);
    v.copy_from_slice(&merged);
    swaps
}

/// Kendall's tau-b with tie correction, in O(n log n).
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    check_lengths(x.len(), y.len())?;
    let n = x.len();
    if n < 2 {
        return Err(EvalError::DegenerateInput("kendall tau needs at least two observations".into()));
    }
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let x_ties = tied_pairs(&xs);
    let joint_ties = tied_pairs(&pairs);
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = merge_count(&mut ys);
    let y_ties = tied_pairs(&ys);
    let n0 = (n as u64) * (n as u64 - 1) / 2;
    if x_ties == n0 || y_ties == n0 {
        return Err(EvalError::DegenerateInput("kendall tau of a constant vector".into()));
    }
    let numerator = n0 as f64 - x_ties as f64 - y_ties as f64 + joint_ties as f64 - 2.0 * swaps as f64;
    let denominator = ((n0 - x_ties) as f64 * (n0 - y_ties) as f64).sqrt();
    Ok((numerator / denominator).clamp(-1.0, 1.0))
}

/// Pearson product-moment correlation.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    check_lengths(x.len(), y.len())?;
    let n = x.len();
    if n < 2 {
        return Err(EvalError::DegenerateInput("pearson r needs at least two observations".into()));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::DegenerateInput("pearson r of a zero-variance vector".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Ranks of `values` (1-based, ties get the mean rank), in input order.
pub(crate) fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Vargha-Delaney Â12: probability that a value from `g1` exceeds one from
/// `g2`, counting ties as one half.
pub fn vargha_delaney_a12(g1: &[f64], g2: &[f64]) -> Result<f64, EvalError> {
    if g1.is_empty() || g2.is_empty() {
        return Err(EvalError::EmptyGroup);
    }
    let combined: Vec<f64> = g1.iter().chain(g2).copied().collect();
    let ranks = midranks(&combined);
    let r1: f64 = ranks[..g1.len()].iter().sum();
    let (n1, n2) = (g1.len() as f64, g2.len() as f64);
    Ok(((r1 - n1 * (n1 + 1.0) / 2.0) / (n1 * n2)).clamp(0.0, 1.0))
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(n: usize, set: &[usize]) -> Vec<bool> {
        (0..n).map(|i| set.contains(&i)).collect()
    }

    #[test]
    fn ochiai_examples() {
        assert_eq!(ochiai(&col(3, &[0, 1]), &col(3, &[0, 1])).unwrap(), 1.0);
        assert_eq!(ochiai(&col(3, &[0]), &col(3, &[1])).unwrap(), 0.0);
        assert_eq!(ochiai(&col(3, &[]), &col(3, &[1])).unwrap(), 0.0);
        assert!(matches!(ochiai(&[true], &[true, false]), Err(EvalError::LengthMismatch { .. })));
    }

    #[test]
    fn coupling_examples() {
        let f = col(6, &[1, 2]);
        assert!(is_coupled(&col(6, &[1]), &f).unwrap());
        assert!(!is_coupled(&col(6, &[]), &f).unwrap());
        assert!(!is_coupled(&col(6, &[1, 5]), &f).unwrap());
    }

    #[test]
    fn correlation_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau_b(&x, &x).unwrap(), 1.0);
        assert_eq!(kendall_tau_b(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!(matches!(kendall_tau_b(&x, &[1.0; 4]), Err(EvalError::DegenerateInput(_))));
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson_r(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson_r(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(pearson_r(&x, &[2.0; 4]), Err(EvalError::DegenerateInput(_))));
    }

    #[test]
    fn a12_examples() {
        assert_eq!(vargha_delaney_a12(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0]).unwrap(), 0.5);
        assert_eq!(vargha_delaney_a12(&[5.0, 6.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(vargha_delaney_a12(&[], &[1.0]), Err(EvalError::EmptyGroup));
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }
}
