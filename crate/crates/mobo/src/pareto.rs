//! Pareto dominance, non-dominated sorting into shells, and hypervolume.
//!
//! All objective vectors follow the minimisation convention. Hypervolume
//! H(X, r) is the Lebesgue measure of the region dominated by X and bounded
//! above by the reference point r; points with any coordinate at or beyond
//! the reference point contribute nothing and are silently excluded.
//!
//! Three hypervolume routes are exposed on purpose: the closed-form 2-D
//! sweep ([`hypervolume_sweep2`]), the exclusive-volume recursion valid for
//! any dimension ([`hypervolume_recursive`]), and a seeded Monte-Carlo
//! estimator ([`hypervolume_mc`]). [`hypervolume`] dispatches to the sweep
//! for M = 2 and the recursion otherwise; the independent routes exist so
//! they can be cross-checked against each other.

use crate::{Error, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Ranking of an archive into Pareto shells.
///
/// Shell 0 holds the indices of the non-dominated points; shell λ holds the
/// indices that are non-dominated once all earlier shells are removed.
/// Shells partition the archive's index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellRanking {
    shells: Vec<Vec<usize>>,
}

impl ShellRanking {
    /// The shells, outermost (non-dominated) first. Indices refer into the
    /// archive the ranking was built from.
    pub fn shells(&self) -> &[Vec<usize>] {
        &self.shells
    }

    /// Number of shells.
    pub fn len(&self) -> usize {
        self.shells.len()
    }

    /// True when there are no shells (never produced by `pareto_shells`).
    pub fn is_empty(&self) -> bool {
        self.shells.is_empty()
    }

    /// Shell position of an archive index, if the index was ranked.
    pub fn shell_index_of(&self, point: usize) -> Option<usize> {
        self.shells
            .iter()
            .position(|shell| shell.contains(&point))
    }
}

/// True iff `a` Pareto-dominates `b`: no worse everywhere, strictly better
/// somewhere.
///
/// # Panics
///
/// Panics when the vectors have different lengths.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(
        a.len(),
        b.len(),
        "dominance requires equal-length objective vectors"
    );
    let mut any_strict = false;
    for (&ai, &bi) in a.iter().zip(b) {
        if ai > bi {
            return false;
        }
        if ai < bi {
            any_strict = true;
        }
    }
    any_strict
}

fn validate_points(points: &[Vec<f64>], m: usize, what: &'static str) -> Result<()> {
    for p in points {
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData(format!("{what} contains a non-finite value")));
        }
    }
    Ok(())
}

/// Indices of all points not dominated by any other point.
///
/// Duplicates are all retained: identical vectors do not dominate each other
/// because dominance requires a strict inequality somewhere.
pub fn nondominated(points: &[Vec<f64>]) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("nondominated needs at least one point"));
    }
    let m = points[0].len();
    validate_points(points, m, "archive")?;
    let mut keep = Vec::new();
    'outer: for i in 0..points.len() {
        for j in 0..points.len() {
            if i != j && dominates(&points[j], &points[i]) {
                continue 'outer;
            }
        }
        keep.push(i);
    }
    Ok(keep)
}

/// Recursive non-dominated sorting: peel the non-dominated set off
/// repeatedly until every point is assigned a shell.
pub fn pareto_shells(points: &[Vec<f64>]) -> Result<ShellRanking> {
    if points.is_empty() {
        return Err(Error::EmptyInput("pareto_shells needs at least one point"));
    }
    let m = points[0].len();
    validate_points(points, m, "archive")?;
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut shells = Vec::new();
    while !remaining.is_empty() {
        let mut shell = Vec::new();
        let mut rest = Vec::new();
        'candidate: for (pos, &i) in remaining.iter().enumerate() {
            for (other_pos, &j) in remaining.iter().enumerate() {
                if pos != other_pos && dominates(&points[j], &points[i]) {
                    rest.push(i);
                    continue 'candidate;
                }
            }
            shell.push(i);
        }
        debug_assert!(!shell.is_empty(), "peeling must make progress");
        shells.push(shell);
        remaining = rest;
    }
    Ok(ShellRanking { shells })
}

/// Keep only the points strictly below the reference point in every
/// coordinate; everything else has zero dominated volume.
fn clip_to_ref(points: &[Vec<f64>], ref_point: &[f64]) -> Vec<Vec<f64>> {
    points
        .iter()
        .filter(|p| p.iter().zip(ref_point).all(|(&x, &r)| x < r))
        .cloned()
        .collect()
}

fn validate_hv_inputs(points: &[Vec<f64>], ref_point: &[f64]) -> Result<()> {
    let m = ref_point.len();
    if m == 0 {
        return Err(Error::EmptyInput("reference point must have length ≥ 1"));
    }
    if ref_point.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData("reference point".into()));
    }
    validate_points(points, m, "hypervolume input")
}

/// Closed-form sorted-sweep hypervolume for exactly two objectives.
///
/// Kept public as an independent route for cross-checking the recursive
/// algorithm.
pub fn hypervolume_sweep2(points: &[Vec<f64>], ref_point: &[f64]) -> Result<f64> {
    if ref_point.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: ref_point.len(),
        });
    }
    validate_hv_inputs(points, ref_point)?;
    let mut below = clip_to_ref(points, ref_point);
    below.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut volume = 0.0;
    let mut best_f2 = ref_point[1];
    for p in &below {
        if p[1] < best_f2 {
            volume += (ref_point[0] - p[0]) * (best_f2 - p[1]);
            best_f2 = p[1];
        }
    }
    Ok(volume)
}

/// Volume of the single box [p, ref].
fn inclusive_volume(p: &[f64], ref_point: &[f64]) -> f64 {
    p.iter().zip(ref_point).map(|(&x, &r)| r - x).product()
}

/// Componentwise worst of two points: the corner of the intersection of
/// their dominated boxes.
fn limit_point(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

/// Drop every point weakly dominated by another (duplicates collapse to
/// one); safe inside the recursion because a weakly dominated point's box is
/// contained in its dominator's.
fn prune_weakly_dominated(mut points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut keep: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    'outer: while let Some(p) = points.pop() {
        for q in keep.iter().chain(points.iter()) {
            if q.iter().zip(&p).all(|(&a, &b)| a <= b) {
                continue 'outer; // q covers p (q == p counts once)
            }
        }
        keep.push(p);
    }
    keep
}

fn exclusive_recursion(points: &[Vec<f64>], ref_point: &[f64]) -> f64 {
    match points.len() {
        0 => 0.0,
        1 => inclusive_volume(&points[0], ref_point),
        _ => {
            let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
            let last = ref_point.len() - 1;
            sorted.sort_by(|a, b| a[last].total_cmp(&b[last]));
            let mut total = 0.0;
            for k in 0..sorted.len() {
                let limits: Vec<Vec<f64>> = sorted[k + 1..]
                    .iter()
                    .map(|q| limit_point(sorted[k], q))
                    .collect();
                let pruned = prune_weakly_dominated(limits);
                total += inclusive_volume(sorted[k], ref_point)
                    - exclusive_recursion(&pruned, ref_point);
            }
            total
        }
    }
}

/// Exact hypervolume via the exclusive-volume recursion with limit-set
/// pruning. Valid for any number of objectives; used by [`hypervolume`] for
/// M ≥ 3 and kept public as the second independent exact route for M = 2.
pub fn hypervolume_recursive(points: &[Vec<f64>], ref_point: &[f64]) -> Result<f64> {
    validate_hv_inputs(points, ref_point)?;
    let below = clip_to_ref(points, ref_point);
    Ok(exclusive_recursion(&prune_weakly_dominated(below), ref_point))
}

/// Exact hypervolume of `points` relative to `ref_point`.
///
/// Dispatches to the closed-form sweep for two objectives and to the
/// exclusive-volume recursion otherwise. The empty set (after clipping to
/// the reference point) has volume 0.
pub fn hypervolume(points: &[Vec<f64>], ref_point: &[f64]) -> Result<f64> {
    match ref_point.len() {
        1 => {
            validate_hv_inputs(points, ref_point)?;
            Ok(clip_to_ref(points, ref_point)
                .iter()
                .map(|p| ref_point[0] - p[0])
                .fold(0.0, f64::max))
        }
        2 => hypervolume_sweep2(points, ref_point),
        _ => hypervolume_recursive(points, ref_point),
    }
}

/// Per-point hypervolume contributions within a mutually non-dominated
/// shell: entry i is H(shell) − H(shell without point i).
///
/// A duplicated point contributes 0 (its twin keeps covering the same
/// region). Errors if some member dominates another.
pub fn hv_contributions(shell: &[Vec<f64>], ref_point: &[f64]) -> Result<Vec<f64>> {
    validate_hv_inputs(shell, ref_point)?;
    for i in 0..shell.len() {
        for j in 0..shell.len() {
            if i != j && dominates(&shell[i], &shell[j]) {
                return Err(Error::InvalidArgument(format!(
                    "hv_contributions requires a mutually non-dominated shell; \
                     member {i} dominates member {j}"
                )));
            }
        }
    }
    let total = hypervolume(shell, ref_point)?;
    let mut contributions = Vec::with_capacity(shell.len());
    for i in 0..shell.len() {
        let mut rest: Vec<Vec<f64>> = Vec::with_capacity(shell.len() - 1);
        rest.extend(shell.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()));
        let without = hypervolume(&rest, ref_point)?;
        contributions.push((total - without).max(0.0));
    }
    Ok(contributions)
}

/// Monte-Carlo hypervolume estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvEstimate {
    /// Estimated hypervolume.
    pub value: f64,
    /// One standard error of the estimate.
    pub std_error: f64,
}

/// Seeded Monte-Carlo hypervolume estimate over the sampling box
/// [ideal, ref].
///
/// Draws `n_samples` uniform points in the box and returns the dominated
/// fraction scaled by the box volume, together with the binomial standard
/// error. Intended as a testing oracle for the exact routes; also available
/// as an opt-in fallback for very many objectives.
pub fn hypervolume_mc(
    points: &[Vec<f64>],
    ref_point: &[f64],
    ideal: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<HvEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "hypervolume_mc needs n_samples ≥ 1".into(),
        ));
    }
    validate_hv_inputs(points, ref_point)?;
    if ideal.len() != ref_point.len() {
        return Err(Error::DimensionMismatch {
            expected: ref_point.len(),
            got: ideal.len(),
        });
    }
    if ideal
        .iter()
        .zip(ref_point)
        .any(|(&q, &r)| !q.is_finite() || q >= r)
    {
        return Err(Error::InvalidArgument(
            "sampling box requires ideal < ref componentwise".into(),
        ));
    }
    let box_volume: f64 = ideal.iter().zip(ref_point).map(|(&q, &r)| r - q).product();
    if points.is_empty() {
        return Ok(HvEstimate {
            value: 0.0,
            std_error: 0.0,
        });
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let m = ref_point.len();
    let mut hits = 0usize;
    let mut sample = vec![0.0f64; m];
    for _ in 0..n_samples {
        for i in 0..m {
            sample[i] = rng.gen_range(ideal[i]..ref_point[i]);
        }
        if points
            .iter()
            .any(|p| p.iter().zip(&sample) .all(|(&x, &s)| x <= s))
        {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / n_samples as f64;
    Ok(HvEstimate {
        value: p_hat * box_volume,
        std_error: box_volume * (p_hat * (1.0 - p_hat) / n_samples as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(rows: &[&[f64]]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn dominance_basic_cases() {
        assert!(dominates(&[1.0, 2.0], &[2.0, 3.0]));
        assert!(!dominates(&[1.0, 2.0], &[1.0, 2.0]), "no strict inequality");
        assert!(!dominates(&[1.0, 3.0], &[2.0, 2.0]), "incomparable pair");
        assert!(dominates(&[1.0, 2.0], &[1.0, 3.0]), "weak in one, strict in other");
    }

    #[test]
    #[should_panic(expected = "equal-length")]
    fn dominance_rejects_length_mismatch() {
        dominates(&[1.0], &[1.0, 2.0]);
    }

    #[test]
    fn nondominated_keeps_incomparable_and_duplicates() {
        assert_eq!(nondominated(&pts(&[&[1.0, 1.0], &[2.0, 2.0]])).unwrap(), vec![0]);
        assert_eq!(
            nondominated(&pts(&[&[1.0, 3.0], &[3.0, 1.0], &[2.0, 2.0]])).unwrap(),
            vec![0, 1, 2]
        );
        assert_eq!(
            nondominated(&pts(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap(),
            vec![0, 1],
            "duplicates are all retained"
        );
    }

    #[test]
    fn nondominated_rejects_empty() {
        assert!(matches!(nondominated(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn shells_total_chain_and_single_shell() {
        let chain = pareto_shells(&pts(&[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]])).unwrap();
        assert_eq!(chain.shells(), &[vec![0], vec![1], vec![2]]);

        let single = pareto_shells(&pts(&[&[1.0, 3.0], &[3.0, 1.0], &[2.0, 2.0]])).unwrap();
        assert_eq!(single.shells(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn shells_mixed_archive() {
        let ranking =
            pareto_shells(&pts(&[&[1.0, 1.0], &[1.0, 3.0], &[3.0, 1.0], &[2.0, 2.0]])).unwrap();
        assert_eq!(ranking.shells(), &[vec![0], vec![1, 2, 3]]);
        assert_eq!(ranking.shell_index_of(3), Some(1));
        assert_eq!(ranking.shell_index_of(9), None);
    }

    #[test]
    fn shells_co_locate_duplicates() {
        let ranking =
            pareto_shells(&pts(&[&[1.0, 1.0], &[1.0, 1.0], &[2.0, 2.0]])).unwrap();
        assert_eq!(ranking.shells(), &[vec![0, 1], vec![2]]);
    }

    #[test]
    fn hypervolume_hand_worked_values() {
        let r = [3.0, 3.0];
        assert_eq!(hypervolume(&pts(&[&[0.0, 0.0]]), &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(hypervolume(&pts(&[&[1.0, 2.0], &[2.0, 1.0]]), &r).unwrap(), 3.0);
        assert_eq!(
            hypervolume(&pts(&[&[1.0, 3.0], &[2.0, 2.0], &[3.0, 1.0]]), &[4.0, 4.0]).unwrap(),
            6.0
        );
        assert_eq!(hypervolume(&[], &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn hypervolume_excludes_points_at_or_beyond_ref() {
        let points = pts(&[&[0.5, 0.5], &[1.0, 0.2], &[2.0, 0.1]]);
        // Second point sits on the ref boundary, third beyond: only the first counts.
        assert_eq!(hypervolume(&points, &[1.0, 1.0]).unwrap(), 0.25);
    }

    #[test]
    fn hypervolume_single_objective_is_best_interval() {
        let points = pts(&[&[0.25], &[0.5]]);
        assert_eq!(hypervolume(&points, &[1.0]).unwrap(), 0.75);
    }

    #[test]
    fn recursion_matches_sweep_on_two_objectives() {
        let points = pts(&[
            &[0.1, 0.9],
            &[0.3, 0.5],
            &[0.5, 0.45],
            &[0.52, 0.2],
            &[0.9, 0.1],
            &[0.7, 0.7], // dominated
        ]);
        let r = [1.0, 1.0];
        let sweep = hypervolume_sweep2(&points, &r).unwrap();
        let rec = hypervolume_recursive(&points, &r).unwrap();
        assert!((sweep - rec).abs() < 1e-12, "sweep {sweep} vs recursion {rec}");
    }

    #[test]
    fn recursion_three_objectives_hand_case() {
        // Boxes [ (0,0,1)..(2,2,2) ] volume 4 and [ (1,1,0)..(2,2,2) ]
        // volume 2, overlap [ (1,1,1)..(2,2,2) ] volume 1 → union 5.
        let points = pts(&[&[0.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        let hv = hypervolume(&points, &[2.0, 2.0, 2.0]).unwrap();
        assert!((hv - 5.0).abs() < 1e-12, "got {hv}");
    }

    #[test]
    fn contributions_hand_worked_values() {
        let r = [3.0, 3.0];
        assert_eq!(
            hv_contributions(&pts(&[&[1.0, 2.0], &[2.0, 1.0]]), &r).unwrap(),
            vec![1.0, 1.0]
        );
        assert_eq!(
            hv_contributions(&pts(&[&[1.0, 3.0], &[2.0, 2.0], &[3.0, 1.0]]), &[4.0, 4.0]).unwrap(),
            vec![1.0, 1.0, 1.0]
        );
        assert_eq!(
            hv_contributions(&pts(&[&[0.0, 0.0]]), &[1.0, 1.0]).unwrap(),
            vec![1.0]
        );
    }

    #[test]
    fn contributions_of_duplicates_are_zero() {
        let shell = pts(&[&[1.0, 2.0], &[1.0, 2.0], &[2.0, 1.0]]);
        let c = hv_contributions(&shell, &[3.0, 3.0]).unwrap();
        assert_eq!(c[0], 0.0);
        assert_eq!(c[1], 0.0);
        assert!(c[2] > 0.0);
    }

    #[test]
    fn contributions_reject_dominated_member() {
        let shell = pts(&[&[1.0, 1.0], &[2.0, 2.0]]);
        assert!(matches!(
            hv_contributions(&shell, &[3.0, 3.0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn mc_estimate_covers_unit_box() {
        let est = hypervolume_mc(&pts(&[&[0.0, 0.0]]), &[1.0, 1.0], &[0.0, 0.0], 100_000, 7)
            .unwrap();
        assert_eq!(est.value, 1.0, "every sample is dominated");
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn mc_estimate_matches_exact_within_4_sigma() {
        let points = pts(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let r = [3.0, 3.0];
        let exact = hypervolume(&points, &r).unwrap();
        let est = hypervolume_mc(&points, &r, &[0.0, 0.0], 1_000_000, 42).unwrap();
        assert!(
            (est.value - exact).abs() <= 4.0 * est.std_error,
            "estimate {} vs exact {exact} (se {})",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn mc_estimate_empty_set_is_zero() {
        let est = hypervolume_mc(&[], &[1.0, 1.0], &[0.0, 0.0], 10, 0).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn mc_rejects_zero_samples_and_bad_box() {
        assert!(matches!(
            hypervolume_mc(&[], &[1.0, 1.0], &[0.0, 0.0], 0, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            hypervolume_mc(&[], &[1.0, 1.0], &[2.0, 0.0], 10, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn mc_is_deterministic_for_a_seed() {
        let points = pts(&[&[0.3, 0.6], &[0.6, 0.3]]);
        let a = hypervolume_mc(&points, &[1.0, 1.0], &[0.0, 0.0], 10_000, 5).unwrap();
        let b = hypervolume_mc(&points, &[1.0, 1.0], &[0.0, 0.0], 10_000, 5).unwrap();
        assert_eq!(a, b);
    }
}
