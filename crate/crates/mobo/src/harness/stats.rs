//! Paired rank statistics and multiple-comparison correction for benchmark
//! summaries.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

/// Largest number of non-zero pairs for which the signed-rank null
/// distribution is computed exactly rather than approximated.
pub const EXACT_ENUMERATION_LIMIT: usize = 20;

/// One-sided paired Wilcoxon signed-rank test of H₁: a > b.
///
/// Differences dᵢ = aᵢ − bᵢ equal to zero are dropped; the remaining |d|
/// receive midranks (ties share the average of their rank range) and the
/// statistic W⁺ sums the ranks of positive differences. With n ≤
/// [`EXACT_ENUMERATION_LIMIT`] non-zero pairs the p-value is exact:
/// P(W ≥ W⁺) over all 2ⁿ equally likely sign assignments of the same rank
/// multiset, computed by subset-sum counting. Larger samples use the normal
/// approximation with tie-corrected variance and a 0.5 continuity
/// correction. All differences zero gives p = 1.
pub fn wilcoxon_signed_rank_one_sided(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput("paired test needs at least one pair"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData("paired samples must be finite".into()));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x - y)
        .filter(|&d| d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Ok(1.0);
    }
    let n = diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0.0_f64; n];
    let mut tie_sum = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[order[j + 1]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        // Positions i..=j (0-based) share the midrank of 1-based ranks
        // i+1..=j+1.
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = midrank;
        }
        let t = (j - i + 1) as f64;
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(&d, _)| d > 0.0)
        .map(|(_, &r)| r)
        .sum();

    if n <= EXACT_ENUMERATION_LIMIT {
        // Midranks are half-integers, so doubling them yields exact
        // integers and the null distribution of 2·W is a subset-sum count.
        let doubled: Vec<usize> = ranks.iter().map(|&r| (2.0 * r).round() as usize).collect();
        let total: usize = doubled.iter().sum();
        let mut counts = vec![0u64; total + 1];
        counts[0] = 1;
        for &r in &doubled {
            for w in (r..=total).rev() {
                counts[w] += counts[w - r];
            }
        }
        let observed = (2.0 * w_plus).round() as usize;
        let at_least: u64 = counts[observed..].iter().sum();
        Ok(at_least as f64 / (1u64 << n) as f64)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_sum / 48.0;
        let z = (w_plus - mean - 0.5) / variance.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("unit normal is valid");
        Ok(1.0 - normal.cdf(z))
    }
}

/// Holm step-down correction at family level α: sort the p-values
/// ascending, reject the i-th smallest while p₍ᵢ₎ ≤ α/(m − i + 1), stop at
/// the first failure. Flags are returned in the original order.
pub fn holm_bonferroni(p_values: &[f64], alpha: f64) -> Result<Vec<bool>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    for &p in p_values {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "p-values must lie in [0, 1], got {p}"
            )));
        }
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].total_cmp(&p_values[j]));
    let mut reject = vec![false; m];
    for (step, &idx) in order.iter().enumerate() {
        if p_values[idx] <= alpha / (m - step) as f64 {
            reject[idx] = true;
        } else {
            break;
        }
    }
    Ok(reject)
}

/// First quartile, median, and third quartile by linear interpolation at
/// positions q·(n − 1) of the sorted sample.
pub fn quartiles(values: &[f64]) -> Result<(f64, f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyInput("quartiles need at least one value"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData("quartile inputs must be finite".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let at = |q: f64| {
        let position = q * (sorted.len() - 1) as f64;
        let lo = position.floor() as usize;
        let hi = position.ceil() as usize;
        sorted[lo] + (sorted[hi] - sorted[lo]) * (position - lo as f64)
    };
    Ok((at(0.25), at(0.5), at(0.75)))
}

/// Sample median (midpoint of the two central order statistics for even n).
pub fn median(values: &[f64]) -> Result<f64> {
    quartiles(values).map(|(_, m, _)| m)
}
