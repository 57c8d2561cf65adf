//! Synthetic benchmark problems (DTLZ1–7, WFG1–9), maximin Latin-hypercube
//! initial designs, and tabulated normalisation bounds.
//!
//! All problems take decision vectors in the unit cube `[0,1]^d`
//! (minimisation convention); the WFG family rescales internally to its
//! native domain `z_i ∈ [0, 2i]`. Problem instances are addressable by
//! string key, e.g. `"WFG4_10_3"` (suite+id, dimension, objectives), with
//! an optional `_k«count»` suffix for non-default WFG position-parameter
//! counts.

mod dtlz;
mod wfg;

use crate::{Error, Result};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Number of random Latin-hypercube candidates scored per maximin design.
pub const DEFAULT_LHS_CANDIDATES: usize = 100;

/// Benchmark family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Suite {
    /// The scalable unconstrained family with plane/sphere fronts.
    Dtlz,
    /// The walking-fish-group family with transformation pipelines.
    Wfg,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Suite::Dtlz => write!(f, "DTLZ"),
            Suite::Wfg => write!(f, "WFG"),
        }
    }
}

/// A validated benchmark-problem instance.
///
/// Construction performs all validation; evaluation can only fail on a
/// malformed input point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ProblemSpec {
    suite: Suite,
    id: u8,
    d: usize,
    m: usize,
    /// WFG position-parameter count; unused for DTLZ.
    k: usize,
}

impl ProblemSpec {
    /// A problem with the default WFG (k, l) split where applicable.
    pub fn new(suite: Suite, id: u8, d: usize, m: usize) -> Result<ProblemSpec> {
        match suite {
            Suite::Dtlz => {
                if !(1..=7).contains(&id) {
                    return Err(Error::UnknownProblem(format!("DTLZ{id}")));
                }
                if m < 2 {
                    return Err(Error::InvalidArgument(
                        "need at least two objectives".into(),
                    ));
                }
                if d < m {
                    return Err(Error::InvalidArgument(format!(
                        "DTLZ needs d ≥ M, got d = {d}, M = {m}"
                    )));
                }
                Ok(ProblemSpec {
                    suite,
                    id,
                    d,
                    m,
                    k: 0,
                })
            }
            Suite::Wfg => {
                let (k, _) = default_wfg_kl(d, m)?;
                Self::wfg_with_kl(id, d, m, k)
            }
        }
    }

    /// A WFG problem with an explicit position-parameter count `k`
    /// (distance parameters are the remaining `d − k`).
    pub fn wfg_with_kl(id: u8, d: usize, m: usize, k: usize) -> Result<ProblemSpec> {
        if !(1..=9).contains(&id) {
            return Err(Error::UnknownProblem(format!("WFG{id}")));
        }
        if m < 2 {
            return Err(Error::InvalidArgument(
                "need at least two objectives".into(),
            ));
        }
        if k < m - 1 {
            return Err(Error::InvalidArgument(format!(
                "WFG needs k ≥ M−1 position parameters, got k = {k}, M = {m}"
            )));
        }
        if k >= d {
            return Err(Error::InvalidArgument(format!(
                "WFG needs at least one distance parameter, got k = {k}, d = {d}"
            )));
        }
        let l = d - k;
        if (id == 2 || id == 3) && l < 2 {
            return Err(Error::InvalidArgument(format!(
                "WFG{id} pairs distance parameters and needs l ≥ 2, got l = {l}"
            )));
        }
        Ok(ProblemSpec {
            suite: Suite::Wfg,
            id,
            d,
            m,
            k,
        })
    }

    /// Family this instance belongs to.
    pub fn suite(&self) -> Suite {
        self.suite
    }

    /// Problem number within its family.
    pub fn id(&self) -> u8 {
        self.id
    }

    /// Decision-space dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Objective count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// WFG (position, distance) parameter counts; `None` for DTLZ.
    pub fn wfg_kl(&self) -> Option<(usize, usize)> {
        match self.suite {
            Suite::Wfg => Some((self.k, self.d - self.k)),
            Suite::Dtlz => None,
        }
    }

    /// Evaluate the objectives at a unit-cube point.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        for &v in x {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "decision variables must lie in [0,1], got {v}"
                )));
            }
        }
        Ok(match self.suite {
            Suite::Dtlz => dtlz::evaluate(self.id, self.m, x),
            Suite::Wfg => wfg::evaluate(self.id, self.m, self.k, x),
        })
    }

    /// The string key, e.g. `"WFG4_10_3"`.
    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}_{}_{}", self.suite, self.id, self.d, self.m)?;
        let is_default_split =
            matches!(default_wfg_kl(self.d, self.m), Ok((k, _)) if k == self.k);
        if self.suite == Suite::Wfg && !is_default_split {
            write!(f, "_k{}", self.k)?;
        }
        Ok(())
    }
}

impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(key: &str) -> Result<ProblemSpec> {
        let bad = || Error::UnknownProblem(key.to_string());
        let mut parts = key.split('_');
        let head = parts.next().ok_or_else(bad)?;
        let (suite, digits) = if let Some(rest) = head.strip_prefix("WFG") {
            (Suite::Wfg, rest)
        } else if let Some(rest) = head.strip_prefix("DTLZ") {
            (Suite::Dtlz, rest)
        } else {
            return Err(bad());
        };
        let id: u8 = digits.parse().map_err(|_| bad())?;
        let d: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let m: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let spec = match parts.next() {
            None => ProblemSpec::new(suite, id, d, m)?,
            Some(extra) => {
                let k: usize = extra
                    .strip_prefix('k')
                    .ok_or_else(bad)?
                    .parse()
                    .map_err(|_| bad())?;
                if suite != Suite::Wfg {
                    return Err(bad());
                }
                ProblemSpec::wfg_with_kl(id, d, m, k)?
            }
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(spec)
    }
}

impl From<ProblemSpec> for String {
    fn from(spec: ProblemSpec) -> String {
        spec.to_string()
    }
}

impl TryFrom<String> for ProblemSpec {
    type Error = Error;

    fn try_from(key: String) -> Result<ProblemSpec> {
        key.parse()
    }
}

/// The default WFG split: (4, d−4) for two objectives, (2M−1, d−(2M−1))
/// otherwise. Errors when no distance parameter would remain.
pub fn default_wfg_kl(d: usize, m: usize) -> Result<(usize, usize)> {
    if m < 2 {
        return Err(Error::InvalidArgument(
            "need at least two objectives".into(),
        ));
    }
    let k = if m == 2 { 4 } else { 2 * m - 1 };
    if d <= k {
        return Err(Error::InvalidArgument(format!(
            "d = {d} leaves no distance parameters after k = {k}"
        )));
    }
    Ok((k, d - k))
}

/// Maximin Latin-hypercube design: `n` points in `[0,1]^d`, the best of
/// `n_candidates` random Latin hypercubes by minimum pairwise distance.
/// Deterministic given the seed.
pub fn lhs_maximin(n: usize, d: usize, n_candidates: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 || d == 0 {
        return Err(Error::EmptyInput("design needs n ≥ 1 points and d ≥ 1"));
    }
    if n_candidates == 0 {
        return Err(Error::InvalidArgument("need at least one candidate".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    let mut strata: Vec<usize> = (0..n).collect();
    for _ in 0..n_candidates {
        let mut design = vec![vec![0.0; d]; n];
        // Row-major storage, column-wise stratification: the column index
        // addresses one coordinate across all rows, so an iterator over
        // `design` cannot replace it.
        #[allow(clippy::needless_range_loop)]
        for col in 0..d {
            strata.shuffle(&mut rng);
            for (row, &stratum) in strata.iter().enumerate() {
                design[row][col] = (stratum as f64 + rng.gen_range(0.0..1.0)) / n as f64;
            }
        }
        let score = min_pairwise_sq_distance(&design);
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, design));
        }
    }
    Ok(best.expect("at least one candidate was generated").1)
}

fn min_pairwise_sq_distance(design: &[Vec<f64>]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..design.len() {
        for j in i + 1..design.len() {
            let d2: f64 = design[i]
                .iter()
                .zip(&design[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            min = min.min(d2);
        }
    }
    min
}

/// Tabulated (ideal, reference) objective vectors used to normalise fronts
/// before quality indicators.
///
/// WFG bounds are closed-form and dimension-independent: ideal 0, reference
/// (3, 5, …, 2M+1). DTLZ bounds are tabulated for d ∈ {2, 5, 10} only
/// (DTLZ7 ideals additionally for M ∈ {2, 3, 5, 10}); anything else is a
/// lookup error.
pub fn reference_ideal_points(spec: &ProblemSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = spec.m();
    match spec.suite() {
        Suite::Wfg => {
            let reference = (1..=m).map(|i| (2 * i + 1) as f64).collect();
            Ok((vec![0.0; m], reference))
        }
        Suite::Dtlz => {
            let column = match spec.d() {
                2 => 0,
                5 => 1,
                10 => 2,
                other => {
                    return Err(Error::UntabulatedConfig(format!(
                        "no tabulated bounds for DTLZ with d = {other}"
                    )))
                }
            };
            let flat = |values: [f64; 3]| (vec![0.0; m], vec![values[column]; m]);
            let (ideal, reference) = match spec.id() {
                1 => flat([120.0, 450.0, 1000.0]),
                2 | 4 | 5 => flat([2.0, 2.0, 4.0]),
                3 => flat([250.0, 1000.0, 2000.0]),
                6 => flat([2.5, 5.0, 10.0]),
                7 => {
                    let last_ref = [23.0, 60.0, 110.0][column];
                    let mut reference = vec![1.5; m - 1];
                    reference.push(last_ref);
                    let last_ideal = match m {
                        2 => 2.307,
                        3 => 2.614,
                        5 => 3.228,
                        10 => 4.763,
                        other => {
                            return Err(Error::UntabulatedConfig(format!(
                                "no tabulated DTLZ7 ideal for M = {other}"
                            )))
                        }
                    };
                    let mut ideal = vec![0.0; m - 1];
                    ideal.push(last_ideal);
                    (ideal, reference)
                }
                _ => unreachable!("ids validated at construction"),
            };
            Ok((ideal, reference))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(key: &str) -> ProblemSpec {
        key.parse().unwrap()
    }

    #[test]
    fn dtlz2_hand_worked_values() {
        let p = spec("DTLZ2_6_2");
        let f = p.evaluate(&[0.5; 6]).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f[0] - inv_sqrt2).abs() < 1e-10);
        assert!((f[1] - inv_sqrt2).abs() < 1e-10);
        let f = p.evaluate(&[0.0, 0.5, 0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!((f[0] - 1.0).abs() < 1e-10);
        assert!(f[1].abs() < 1e-10);
    }

    #[test]
    fn dtlz_plane_and_sphere_identities() {
        let mut x = vec![0.3, 0.8, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5];
        let f = spec("DTLZ1_10_3").evaluate(&x).unwrap();
        assert!((f.iter().sum::<f64>() - 0.5).abs() < 1e-10);
        for key in ["DTLZ2_10_3", "DTLZ3_10_3", "DTLZ4_10_3"] {
            let f = spec(key).evaluate(&x).unwrap();
            let radius: f64 = f.iter().map(|v| v * v).sum();
            assert!((radius - 1.0).abs() < 1e-10, "{key} radius {radius}");
        }
        // DTLZ6 reaches its front at zero distance variables instead.
        x[2..].fill(0.0);
        let f = spec("DTLZ6_10_3").evaluate(&x).unwrap();
        let radius: f64 = f.iter().map(|v| v * v).sum();
        assert!((radius - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dtlz7_hand_worked_origin() {
        let f = spec("DTLZ7_10_3").evaluate(&[0.0; 10]).unwrap();
        assert_eq!(&f[..2], &[0.0, 0.0]);
        assert!((f[2] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn wfg1_hand_worked_origin() {
        let f = spec("WFG1_10_3").evaluate(&[0.0; 10]).unwrap();
        assert!((f[0] - 1.0).abs() < 1e-9);
        assert!((f[1] - 1.0).abs() < 1e-9);
        assert!((f[2] - 7.0).abs() < 1e-9);
    }

    #[test]
    fn wfg_outputs_respect_family_bounds() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        use rand::Rng;
        for id in 1..=9 {
            let p = ProblemSpec::new(Suite::Wfg, id, 10, 3).unwrap();
            for _ in 0..200 {
                let x: Vec<f64> = (0..10).map(|_| rng.gen_range(0.0..1.0)).collect();
                let f = p.evaluate(&x).unwrap();
                for (i, &v) in f.iter().enumerate() {
                    let upper = (2 * (i + 1) + 1) as f64;
                    assert!(
                        v.is_finite() && v >= 0.0 && v <= upper + 1e-9,
                        "WFG{id} objective {i} = {v} outside [0, {upper}]"
                    );
                }
            }
        }
    }

    #[test]
    fn all_problems_finite_on_random_inputs() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        use rand::Rng;
        let mut keys: Vec<String> = (1..=7).map(|i| format!("DTLZ{i}_6_2")).collect();
        keys.extend((1..=9).map(|i| format!("WFG{i}_6_2")));
        for key in keys {
            let p = spec(&key);
            for _ in 0..100 {
                let x: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..1.0)).collect();
                let f = p.evaluate(&x).unwrap();
                assert!(f.iter().all(|v| v.is_finite()), "{key} produced {f:?}");
            }
        }
    }

    #[test]
    fn default_split_rule_examples() {
        assert_eq!(default_wfg_kl(6, 2).unwrap(), (4, 2));
        assert_eq!(default_wfg_kl(10, 3).unwrap(), (5, 5));
        assert_eq!(default_wfg_kl(10, 5).unwrap(), (9, 1));
        assert!(default_wfg_kl(4, 2).is_err());
    }

    #[test]
    fn keys_round_trip() {
        for key in ["WFG4_10_3", "DTLZ7_5_2", "WFG2_6_2", "WFG5_10_3_k6"] {
            assert_eq!(spec(key).to_string(), key);
        }
        assert!("WFG0_6_2".parse::<ProblemSpec>().is_err());
        assert!("DTLZ8_6_2".parse::<ProblemSpec>().is_err());
        assert!("ZDT1_6_2".parse::<ProblemSpec>().is_err());
        assert!("WFG1".parse::<ProblemSpec>().is_err());
        assert!("DTLZ2_6_2_k3".parse::<ProblemSpec>().is_err());
    }

    #[test]
    fn construction_rejects_invalid_configs() {
        assert!(ProblemSpec::new(Suite::Dtlz, 2, 2, 3).is_err()); // d < M
        assert!(ProblemSpec::new(Suite::Wfg, 4, 4, 2).is_err()); // no distance vars
        assert!(ProblemSpec::wfg_with_kl(3, 6, 2, 5).is_err()); // l = 1 with pairing
        assert!(ProblemSpec::wfg_with_kl(4, 6, 4, 2).is_err()); // k < M−1
        assert!(ProblemSpec::wfg_with_kl(4, 6, 2, 6).is_err()); // k = d
    }

    #[test]
    fn evaluate_rejects_bad_points() {
        let p = spec("DTLZ2_6_2");
        assert!(p.evaluate(&[0.5; 5]).is_err());
        assert!(p.evaluate(&[0.5, 0.5, 0.5, 0.5, 0.5, 1.5]).is_err());
        assert!(p.evaluate(&[0.5, 0.5, 0.5, 0.5, 0.5, f64::NAN]).is_err());
    }

    #[test]
    fn lhs_columns_are_stratified() {
        let design = lhs_maximin(8, 3, DEFAULT_LHS_CANDIDATES, 31).unwrap();
        assert_eq!(design.len(), 8);
        for col in 0..3 {
            let mut counts = vec![0usize; 8];
            for row in &design {
                let stratum = (row[col] * 8.0).floor() as usize;
                counts[stratum.min(7)] += 1;
            }
            assert!(counts.iter().all(|&c| c == 1), "column {col}: {counts:?}");
        }
    }

    #[test]
    fn lhs_is_deterministic_and_maximin_improves_on_first_candidate() {
        let a = lhs_maximin(6, 2, 100, 77).unwrap();
        let b = lhs_maximin(6, 2, 100, 77).unwrap();
        assert_eq!(a, b);
        let first_candidate = lhs_maximin(6, 2, 1, 77).unwrap();
        assert!(
            min_pairwise_sq_distance(&a) >= min_pairwise_sq_distance(&first_candidate),
            "selection must not be worse than the first candidate"
        );
    }

    #[test]
    fn single_point_design_is_one_uniform_point() {
        let design = lhs_maximin(1, 4, 100, 3).unwrap();
        assert_eq!(design.len(), 1);
        assert!(design[0].iter().all(|&v| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn tabulated_bounds_match_expected_rows() {
        let (ideal, reference) = reference_ideal_points(&spec("DTLZ1_5_3")).unwrap();
        assert_eq!(ideal, vec![0.0; 3]);
        assert_eq!(reference, vec![450.0; 3]);

        let (ideal, reference) = reference_ideal_points(&spec("WFG6_10_3")).unwrap();
        assert_eq!(ideal, vec![0.0; 3]);
        assert_eq!(reference, vec![3.0, 5.0, 7.0]);

        let (ideal, reference) = reference_ideal_points(&spec("DTLZ7_5_2")).unwrap();
        assert_eq!(ideal, vec![0.0, 2.307]);
        assert_eq!(reference, vec![1.5, 60.0]);

        let (_, reference) = reference_ideal_points(&spec("DTLZ3_10_3")).unwrap();
        assert_eq!(reference, vec![2000.0; 3]);

        assert!(matches!(
            reference_ideal_points(&spec("DTLZ2_7_3")),
            Err(Error::UntabulatedConfig(_))
        ));
        assert!(matches!(
            reference_ideal_points(&spec("DTLZ7_10_4")),
            Err(Error::UntabulatedConfig(_))
        ));
    }
}
